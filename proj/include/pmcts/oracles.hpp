#pragma once

// Non-LLM pruner and critic implementations: identity (vanilla full-width
// search), fixed-set mock, seeded random subset, the cheating pruner used as
// a deterministic stand-in for an LLM in tests, plus outcome / material /
// constant / hybrid critics. All of them are pure and thread-safe.

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pmcts/chess.hpp"
#include "pmcts/game.hpp"
#include "pmcts/search.hpp"

namespace pmcts {

template <GameRules G>
class IdentityPruner : public Pruner<G> {
public:
    std::vector<typename G::Action> prune(const GameState<G>& state) override {
        return state.legal_actions();
    }
    std::string id() const override { return "identity"; }
};

// Fixed answers per board key; anything unknown falls back to the full set.
template <GameRules G>
class MockPruner : public Pruner<G> {
public:
    explicit MockPruner(std::map<std::string, std::vector<std::string>> table)
        : table_(std::move(table)) {}

    std::vector<typename G::Action> prune(const GameState<G>& state) override {
        auto it = table_.find(state.board_key());
        if (it == table_.end()) return state.legal_actions();
        std::vector<typename G::Action> out;
        for (const auto& text : it->second) {
            auto a = state.game().decode_action(state.board(), text);
            if (!a) throw PrunerFailure("mock table holds unparsable action " + text);
            out.push_back(*a);
        }
        return out;
    }
    std::string id() const override { return "mock"; }

private:
    std::map<std::string, std::vector<std::string>> table_;
};

// {solution} plus k-1 seeded-random distinct other legal actions; the whole
// legal set when it has at most k elements.
template <GameRules G>
std::vector<typename G::Action> cheat_prune(const GameState<G>& state,
                                            const typename G::Action& solution, int k,
                                            std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("cheat_prune: k >= 1");
    auto legal = state.legal_actions();
    bool found = false;
    for (const auto& a : legal) found = found || a == solution;
    if (!found)
        throw IllegalAction(state.game().encode_action(solution) + " at " + state.board_key());
    if (static_cast<int>(legal.size()) <= k) return legal;
    std::vector<typename G::Action> out{solution};
    std::vector<typename G::Action> pool;
    for (const auto& a : legal)
        if (!(a == solution)) pool.push_back(a);
    std::mt19937_64 rng(mix_seed(seed, stable_hash64(state.solver_key())));
    while (static_cast<int>(out.size()) < k) {
        std::size_t i = rand_index(rng, pool.size());
        out.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

// Knows the answer at mapped states (board key -> encoded action) and pads
// the set with seeded-random legal moves; unmapped states get a seeded-random
// subset of width `off_width` (default k). Deterministic per state. A
// narrower off-line width mimics an oracle whose suggestions concentrate on
// few moves away from the known line.
template <GameRules G>
class CheatPruner : public Pruner<G> {
public:
    CheatPruner(std::map<std::string, std::string> solutions, int k, std::uint64_t seed,
                int off_width = -1)
        : solutions_(std::move(solutions)), k_(k), seed_(seed),
          off_width_(off_width < 1 ? k : off_width) {}

    std::vector<typename G::Action> prune(const GameState<G>& state) override {
        auto it = solutions_.find(state.board_key());
        if (it != solutions_.end()) {
            auto a = state.game().decode_action(state.board(), it->second);
            if (!a) throw PrunerFailure("cheat table holds unparsable action " + it->second);
            return cheat_prune(state, *a, k_, seed_);
        }
        auto legal = state.legal_actions();
        if (static_cast<int>(legal.size()) <= off_width_) return legal;
        std::mt19937_64 rng(mix_seed(seed_, stable_hash64(state.solver_key())));
        std::vector<typename G::Action> out;
        while (static_cast<int>(out.size()) < off_width_) {
            std::size_t i = rand_index(rng, legal.size());
            out.push_back(legal[i]);
            legal.erase(legal.begin() + static_cast<std::ptrdiff_t>(i));
        }
        return out;
    }
    std::string id() const override { return "cheat"; }
    int max_width() const override { return std::max(k_, off_width_); }

private:
    std::map<std::string, std::string> solutions_;
    int k_;
    std::uint64_t seed_;
    int off_width_;
};

// Keeps each legal action independently with probability keep_prob (seeded
// per state), always at least one. Used to build arbitrary pruned spaces for
// the pruning-bound checks.
template <GameRules G>
class RandomSubsetPruner : public Pruner<G> {
public:
    RandomSubsetPruner(double keep_prob, std::uint64_t seed) : keep_prob_(keep_prob), seed_(seed) {}

    std::vector<typename G::Action> prune(const GameState<G>& state) override {
        auto legal = state.legal_actions();
        if (legal.size() <= 1) return legal;
        std::mt19937_64 rng(mix_seed(seed_, stable_hash64(state.solver_key())));
        std::vector<typename G::Action> out;
        for (const auto& a : legal)
            if (rand_unit(rng) < keep_prob_) out.push_back(a);
        if (out.empty()) out.push_back(legal[rand_index(rng, legal.size())]);
        return out;
    }
    std::string id() const override { return "random_subset"; }

private:
    double keep_prob_;
    std::uint64_t seed_;
};

// Terminal outcome value scaled; 0 on ongoing positions.
template <GameRules G>
double outcome_eval(const GameState<G>& state, double reward_scale) {
    GameOutcome o = state.outcome();
    return o == GameOutcome::Ongoing ? 0.0 : terminal_value(o) * reward_scale;
}

template <GameRules G>
class OutcomeCritic : public Critic<G> {
public:
    explicit OutcomeCritic(double reward_scale = 1.0) : scale_(reward_scale) {}
    double evaluate(const GameState<G>& state) override { return outcome_eval(state, scale_); }
    std::string id() const override { return "outcome"; }

private:
    double scale_;
};

template <GameRules G>
class ConstantCritic : public Critic<G> {
public:
    explicit ConstantCritic(double value) : value_(value) {}
    double evaluate(const GameState<G>&) override { return value_; }
    std::string id() const override { return "constant"; }

private:
    double value_;
};

// Piece values in centipawns; terminal values are on the post-division scale.
struct CentipawnTable {
    int pawn = 100;
    int knight = 325;
    int bishop = 325;
    int rook = 500;
    int queen = 900;
    double win = 10.0;
    double draw = 0.0;
    double loss = -10.0;

    int value_of(int piece_type) const {
        switch (piece_type) {
            case chess_detail::PT_PAWN: return pawn;
            case chess_detail::PT_KNIGHT: return knight;
            case chess_detail::PT_BISHOP: return bishop;
            case chess_detail::PT_ROOK: return rook;
            case chess_detail::PT_QUEEN: return queen;
            default: return 0;  // kings are excluded
        }
    }
};

// (Max-side material - Min-side material) / 1000; finished games collapse to
// the terminal values of the table.
template <GameRules G>
double material_eval(const GameState<G>& state, const CentipawnTable& table = {}) {
    if constexpr (std::is_same_v<G, ChessGame>) {
        GameOutcome o = state.outcome();
        if (o == GameOutcome::MaxWins) return table.win;
        if (o == GameOutcome::MinWins) return table.loss;
        if (o == GameOutcome::Draw) return table.draw;
        bool max_white = state.game().max_is_white();
        long centipawns = 0;
        for (int i = 0; i < 64; ++i) {
            int p = state.board().squares[i];
            if (p == 0) continue;
            int value = table.value_of(p < 0 ? -p : p);
            bool white = p > 0;
            centipawns += (white == max_white) ? value : -value;
        }
        return static_cast<double>(centipawns) / 1000.0;
    } else {
        throw UnsupportedGame("material critic needs a chess state, got " + state.game().name());
    }
}

class MaterialCritic : public Critic<ChessGame> {
public:
    explicit MaterialCritic(CentipawnTable table = {}) : table_(table) {}
    double evaluate(const GameState<ChessGame>& state) override {
        return material_eval(state, table_);
    }
    std::string id() const override { return "material"; }

private:
    CentipawnTable table_;
};

// Sum of two critics; the full-game chess configuration pairs the material
// critic with an LLM critic this way.
template <GameRules G>
double hybrid_eval(const GameState<G>& state, Critic<G>& rule_critic, Critic<G>& llm_critic) {
    return rule_critic.evaluate(state) + llm_critic.evaluate(state);
}

template <GameRules G>
class HybridCritic : public Critic<G> {
public:
    HybridCritic(std::shared_ptr<Critic<G>> rule, std::shared_ptr<Critic<G>> llm)
        : rule_(std::move(rule)), llm_(std::move(llm)) {}
    double evaluate(const GameState<G>& state) override {
        return hybrid_eval(state, *rule_, *llm_);
    }
    std::string id() const override { return "hybrid(" + rule_->id() + "+" + llm_->id() + ")"; }

private:
    std::shared_ptr<Critic<G>> rule_;
    std::shared_ptr<Critic<G>> llm_;
};

}  // namespace pmcts
