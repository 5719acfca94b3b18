#pragma once

// Core contract shared by every concrete game and the search engine: a
// deterministic turn-based zero-sum two-player game. A game object is a small
// immutable rules value; positions are value types. The identity of a state is
// its action history from the constructed root, so transpositions reached by
// different move orders are distinct states.

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pmcts {

enum class PlayerRole { Max, Min };

constexpr PlayerRole opponent_of(PlayerRole r) {
    return r == PlayerRole::Max ? PlayerRole::Min : PlayerRole::Max;
}

inline std::string to_string(PlayerRole r) {
    return r == PlayerRole::Max ? "max" : "min";
}

enum class GameOutcome { Ongoing, MaxWins, MinWins, Draw };

inline bool is_terminal(GameOutcome o) { return o != GameOutcome::Ongoing; }

// Value of a finished game from the Max player's perspective.
inline double terminal_value(GameOutcome o) {
    switch (o) {
        case GameOutcome::MaxWins: return 1.0;
        case GameOutcome::MinWins: return -1.0;
        case GameOutcome::Draw: return 0.0;
        case GameOutcome::Ongoing: break;
    }
    throw std::logic_error("terminal_value: game still ongoing");
}

inline std::string to_string(GameOutcome o) {
    switch (o) {
        case GameOutcome::MaxWins: return "max_wins";
        case GameOutcome::MinWins: return "min_wins";
        case GameOutcome::Draw: return "draw";
        default: return "ongoing";
    }
}

struct IllegalAction : std::runtime_error {
    explicit IllegalAction(const std::string& what) : std::runtime_error("illegal action: " + what) {}
};

struct TerminalState : std::runtime_error {
    explicit TerminalState(const std::string& what) : std::runtime_error("terminal state: " + what) {}
};

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& reason, std::size_t byte_offset)
        : std::runtime_error("parse error at byte " + std::to_string(byte_offset) + ": " + reason),
          offset(byte_offset) {}
};

struct GameOngoing : std::runtime_error {
    explicit GameOngoing(const std::string& what) : std::runtime_error("game ongoing: " + what) {}
};

struct UnsupportedGame : std::runtime_error {
    explicit UnsupportedGame(const std::string& what) : std::runtime_error("unsupported game: " + what) {}
};

// Rules contract. `legal_actions` must return a deterministic, stable ordering
// (lexicographic on the canonical move encoding) and be empty only at
// terminal positions for games without a pass move. `expected_reward` is the
// mean per-move reward R(s, a); all built-in board games return 0 and carry
// outcomes through critics instead.
template <typename G>
concept GameRules = requires(const G g, const typename G::Board b, const typename G::Action a,
                             std::string_view text) {
    typename G::Board;
    typename G::Action;
    requires std::equality_comparable<typename G::Action>;
    { g.name() } -> std::convertible_to<std::string>;
    { g.initial_board() } -> std::same_as<typename G::Board>;
    { g.legal_actions(b) } -> std::same_as<std::vector<typename G::Action>>;
    { g.apply(b, a) } -> std::same_as<typename G::Board>;
    { g.outcome(b) } -> std::same_as<GameOutcome>;
    { g.expected_reward(b, a) } -> std::convertible_to<double>;
    { g.reward_bound() } -> std::convertible_to<double>;
    { g.encode_action(a) } -> std::convertible_to<std::string>;
    { g.decode_action(b, text) } -> std::same_as<std::optional<typename G::Action>>;
    { g.board_key(b) } -> std::convertible_to<std::string>;
};

// Games with per-visit stochastic rewards provide sample_reward; everyone else
// falls back to the mean.
template <typename G>
concept HasSampleReward = requires(const G g, const typename G::Board b, const typename G::Action a,
                                   std::mt19937_64 rng) {
    { g.sample_reward(b, a, rng) } -> std::convertible_to<double>;
};

template <GameRules G>
double sample_reward(const G& game, const typename G::Board& board, const typename G::Action& action,
                     std::mt19937_64& rng) {
    if constexpr (HasSampleReward<G>) {
        return game.sample_reward(board, action, rng);
    } else {
        (void)rng;
        return game.expected_reward(board, action);
    }
}

// Games may declare a compact Markov key for exact solving (collapses
// transpositions when that is sound for the game's rules). Default is the
// full history encoding, which is always sound.
template <typename G>
concept HasSolverKey = requires(const G g, const typename G::Board b) {
    { g.solver_key(b) } -> std::convertible_to<std::string>;
};

// A position plus the action sequence that produced it. Immutable after
// construction; apply() returns a new state.
template <GameRules G>
class GameState {
public:
    using Action = typename G::Action;
    using Board = typename G::Board;

    explicit GameState(const G& game) : game_(&game), board_(game.initial_board()) {}

    const G& game() const { return *game_; }
    const Board& board() const { return board_; }
    const std::vector<Action>& history() const { return history_; }
    std::size_t ply() const { return history_.size(); }

    PlayerRole turn() const { return ply() % 2 == 0 ? PlayerRole::Max : PlayerRole::Min; }

    GameOutcome outcome() const { return game_->outcome(board_); }
    bool terminal() const { return is_terminal(outcome()); }

    std::vector<Action> legal_actions() const { return game_->legal_actions(board_); }

    bool is_legal(const Action& a) const {
        auto actions = legal_actions();
        for (const auto& x : actions)
            if (x == a) return true;
        return false;
    }

    GameState apply(const Action& a) const {
        if (terminal()) throw TerminalState("cannot apply " + game_->encode_action(a));
        if (!is_legal(a)) throw IllegalAction(game_->encode_action(a) + " at " + game_->board_key(board_));
        return apply_unchecked(a);
    }

    // Caller guarantees legality (action came from legal_actions / a validated
    // pruned set). Used on the search hot path.
    GameState apply_unchecked(const Action& a) const {
        GameState next(*this);
        next.board_ = game_->apply(board_, a);
        next.history_.push_back(a);
        return next;
    }

    GameState apply_encoded(std::string_view text) const {
        auto a = game_->decode_action(board_, text);
        if (!a) throw IllegalAction(std::string(text) + " (unparsable) at " + game_->board_key(board_));
        return apply(*a);
    }

    std::string board_key() const { return game_->board_key(board_); }

    std::string history_key() const {
        std::string key = "h:";
        for (const auto& a : history_) {
            key += game_->encode_action(a);
            key += '/';
        }
        return key;
    }

    // Key used by the exact solver's memo tables.
    std::string solver_key() const {
        if constexpr (HasSolverKey<G>) {
            return game_->solver_key(board_);
        } else {
            return history_key();
        }
    }

private:
    const G* game_;
    std::vector<Action> history_;
    Board board_;
};

template <GameRules G>
PlayerRole turn_of(const GameState<G>& s) {
    return s.turn();
}

// Combined reward of one full step: R(s, a) + R(s∘a, b).
template <GameRules G>
double pair_reward(const GameState<G>& s, const typename G::Action& a, const typename G::Action& b) {
    double r_max = s.game().expected_reward(s.board(), a);
    GameState<G> half = s.apply(a);
    double r_min = half.game().expected_reward(half.board(), b);
    if (!half.is_legal(b))
        throw IllegalAction(s.game().encode_action(b) + " at " + half.board_key());
    return r_max + r_min;
}

// Recompute the board by replaying the history from the initial position.
// Used by replay-determinism checks and transcript audits.
template <GameRules G>
typename G::Board replay_board(const GameState<G>& s) {
    typename G::Board b = s.game().initial_board();
    for (const auto& a : s.history()) b = s.game().apply(b, a);
    return b;
}

// Deterministic 64-bit string hash (FNV-1a); std::hash is not pinned across
// implementations and these hashes feed seeded oracles.
inline std::uint64_t stable_hash64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Portable bounded draws. The standard distributions are implementation
// defined, which would break bit-reproducible runs across toolchains.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pmcts
