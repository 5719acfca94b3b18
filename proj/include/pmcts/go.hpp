#pragma once

// Small-board Go. Area scoring (stones plus surrounded empty points), komi 0,
// suicide illegal, game ends on two consecutive passes or at a hard ply cap
// (default 3*N*N) to keep every game finite. Two ko regimes:
//   - PositionalSuperko: a move may never recreate any earlier stone
//     configuration (the default, used by the 5x5 game),
//   - SimpleKo: only the immediate single-stone recapture is banned (used by
//     the exactly-solvable capped 3x3 variant, whose state then stays Markov
//     in board/ko/passes/ply).
// Black moves first and is the Max player. Actions encode as "A1".."E5" plus
// "pass"; legal_actions is sorted on that encoding.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmcts/game.hpp"

namespace pmcts {

enum class KoRule { PositionalSuperko, SimpleKo };

struct GoBoard {
    std::int8_t size = 5;
    std::array<std::int8_t, 25> points{};  // 0 empty, 1 black, 2 white
    std::int8_t ko_point = -1;             // SimpleKo: banned recapture point
    std::uint8_t consecutive_passes = 0;
    std::uint16_t moves_played = 0;
    std::uint16_t black_captured = 0;  // stones black has captured
    std::uint16_t white_captured = 0;
    std::vector<std::uint64_t> seen_positions;  // sorted; superko history

    bool operator==(const GoBoard& o) const {
        return size == o.size && points == o.points && ko_point == o.ko_point &&
               consecutive_passes == o.consecutive_passes && moves_played == o.moves_played;
    }
};

namespace go_detail {

inline const std::array<std::array<std::uint64_t, 25>, 2>& zobrist() {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, 25>, 2> t{};
        std::mt19937_64 rng(0x60b0a4d5eed1234full);
        for (auto& row : t)
            for (auto& x : row) x = rng();
        return t;
    }();
    return table;
}

inline std::uint64_t position_hash(const GoBoard& b) {
    std::uint64_t h = 0;
    int n = b.size * b.size;
    for (int i = 0; i < n; ++i)
        if (b.points[i] != 0) h ^= zobrist()[b.points[i] - 1][i];
    return h;
}

inline int neighbors(const GoBoard& b, int point, int out[4]) {
    int size = b.size;
    int col = point % size, row = point / size;
    int n = 0;
    if (col > 0) out[n++] = point - 1;
    if (col + 1 < size) out[n++] = point + 1;
    if (row > 0) out[n++] = point - size;
    if (row + 1 < size) out[n++] = point + size;
    return n;
}

// Flood-fills the string containing `point`; returns its stones and whether it
// has any liberty.
inline bool string_with_liberty(const GoBoard& b, int point, std::vector<int>& stones) {
    stones.clear();
    int color = b.points[point];
    bool liberty = false;
    std::array<bool, 25> visited{};
    std::vector<int> stack{point};
    visited[point] = true;
    int nb[4];
    while (!stack.empty()) {
        int p = stack.back();
        stack.pop_back();
        stones.push_back(p);
        int n = neighbors(b, p, nb);
        for (int i = 0; i < n; ++i) {
            int q = nb[i];
            if (b.points[q] == 0) liberty = true;
            else if (b.points[q] == color && !visited[q]) {
                visited[q] = true;
                stack.push_back(q);
            }
        }
    }
    return liberty;
}

// Places a stone and resolves captures. Returns the number of opponent stones
// removed, or -1 if the move is suicide.
inline int resolve_move(GoBoard& b, int point, int color) {
    b.points[point] = static_cast<std::int8_t>(color);
    int captured = 0;
    int opponent = 3 - color;
    std::vector<int> stones;
    int nb[4];
    int n = neighbors(b, point, nb);
    for (int i = 0; i < n; ++i) {
        int q = nb[i];
        if (b.points[q] == opponent && !string_with_liberty(b, q, stones)) {
            for (int s : stones) b.points[s] = 0;
            captured += static_cast<int>(stones.size());
        }
    }
    if (!string_with_liberty(b, point, stones)) return -1;  // suicide
    return captured;
}

}  // namespace go_detail

class GoGame {
public:
    using Board = GoBoard;
    using Action = int;  // 0..size*size-1 points, size*size = pass

    explicit GoGame(int size = 5, KoRule ko = KoRule::PositionalSuperko, int ply_cap = -1)
        : size_(size), ko_(ko), ply_cap_(ply_cap < 0 ? 3 * size * size : ply_cap) {}

    std::string name() const { return size_ == 5 ? "minigo" : "go" + std::to_string(size_); }

    int size() const { return size_; }
    int pass_action() const { return size_ * size_; }
    KoRule ko_rule() const { return ko_; }
    int ply_cap() const { return ply_cap_; }

    Board initial_board() const {
        Board b;
        b.size = static_cast<std::int8_t>(size_);
        b.seen_positions.push_back(go_detail::position_hash(b));
        return b;
    }

    std::vector<Action> legal_actions(const Board& b) const {
        std::vector<Action> actions;
        if (outcome(b) != GameOutcome::Ongoing) return actions;
        int n = size_ * size_;
        // Column-major point order gives the lexicographic "A1","A2",..,"B1"
        // ordering of the encodings; "pass" sorts after all points.
        for (int col = 0; col < size_; ++col)
            for (int row = 0; row < size_; ++row) {
                int p = row * size_ + col;
                if (b.points[p] == 0 && move_legal(b, p)) actions.push_back(p);
            }
        actions.push_back(n);  // pass
        return actions;
    }

    Board apply(const Board& b, Action a) const {
        Board next = b;
        ++next.moves_played;
        if (a == pass_action()) {
            ++next.consecutive_passes;
            next.ko_point = -1;
            return next;
        }
        next.consecutive_passes = 0;
        int color = to_move(b);
        int captured = go_detail::resolve_move(next, a, color);
        if (color == 1) next.black_captured += static_cast<std::uint16_t>(captured);
        else next.white_captured += static_cast<std::uint16_t>(captured);
        next.ko_point = -1;
        if (ko_ == KoRule::SimpleKo && captured == 1) {
            // Recapture is banned when the new stone stands alone with exactly
            // one liberty: the point just vacated.
            std::vector<int> stones;
            go_detail::string_with_liberty(next, a, stones);
            if (stones.size() == 1) {
                int nb[4];
                int cnt = go_detail::neighbors(next, a, nb);
                int libs = 0, lib_point = -1;
                for (int i = 0; i < cnt; ++i)
                    if (next.points[nb[i]] == 0) {
                        ++libs;
                        lib_point = nb[i];
                    }
                if (libs == 1) next.ko_point = static_cast<std::int8_t>(lib_point);
            }
        }
        if (ko_ == KoRule::PositionalSuperko) {
            std::uint64_t h = go_detail::position_hash(next);
            auto it = std::lower_bound(next.seen_positions.begin(), next.seen_positions.end(), h);
            next.seen_positions.insert(it, h);
        }
        return next;
    }

    GameOutcome outcome(const Board& b) const {
        if (b.consecutive_passes < 2 && b.moves_played < ply_cap_) return GameOutcome::Ongoing;
        int score = area_score(b);
        if (score > 0) return GameOutcome::MaxWins;
        if (score < 0) return GameOutcome::MinWins;
        return GameOutcome::Draw;
    }

    double expected_reward(const Board&, Action) const { return 0.0; }
    double reward_bound() const { return 0.0; }

    std::string encode_action(Action a) const {
        if (a == pass_action()) return "pass";
        int col = a % size_, row = a / size_;
        return {static_cast<char>('A' + col), static_cast<char>('1' + row)};
    }

    std::optional<Action> decode_action(const Board&, std::string_view text) const {
        if (text == "pass") return pass_action();
        if (text.size() != 2) return std::nullopt;
        int col = text[0] - 'A';
        int row = text[1] - '1';
        if (col < 0 || col >= size_ || row < 0 || row >= size_) return std::nullopt;
        return row * size_ + col;
    }

    std::string board_key(const Board& b) const {
        std::string key;
        int n = size_ * size_;
        for (int i = 0; i < n; ++i) key += ".XO"[b.points[i]];
        key += '|';
        key += to_move(b) == 1 ? 'b' : 'w';
        key += "|k" + std::to_string(static_cast<int>(b.ko_point));
        key += "|p" + std::to_string(static_cast<int>(b.consecutive_passes));
        key += "|m" + std::to_string(static_cast<int>(b.moves_played));
        return key;
    }

    std::string solver_key(const Board& b) const {
        std::string key = board_key(b);
        if (ko_ == KoRule::PositionalSuperko) {
            // Keep the key sound: future legality depends on the whole set of
            // positions seen so far.
            std::uint64_t digest = 0;
            for (std::uint64_t h : b.seen_positions) digest = mix_seed(digest, h);
            key += "|s" + std::to_string(digest);
        }
        return key;
    }

    // Area score, Black minus White, komi 0: stones on the board plus empty
    // regions bordered by a single color only.
    int area_score(const Board& b) const {
        int n = size_ * size_;
        int black = 0, white = 0;
        std::array<bool, 25> visited{};
        int nb[4];
        for (int i = 0; i < n; ++i) {
            if (b.points[i] == 1) ++black;
            else if (b.points[i] == 2) ++white;
            else if (!visited[i]) {
                int region = 0;
                bool touch_black = false, touch_white = false;
                std::vector<int> stack{i};
                visited[i] = true;
                while (!stack.empty()) {
                    int p = stack.back();
                    stack.pop_back();
                    ++region;
                    int cnt = go_detail::neighbors(b, p, nb);
                    for (int j = 0; j < cnt; ++j) {
                        int q = nb[j];
                        if (b.points[q] == 1) touch_black = true;
                        else if (b.points[q] == 2) touch_white = true;
                        else if (!visited[q]) {
                            visited[q] = true;
                            stack.push_back(q);
                        }
                    }
                }
                if (touch_black && !touch_white) black += region;
                else if (touch_white && !touch_black) white += region;
            }
        }
        return black - white;
    }

    static int to_move(const Board& b) { return b.moves_played % 2 == 0 ? 1 : 2; }

    std::string board_text(const Board& b) const {
        std::string out;
        for (int row = size_ - 1; row >= 0; --row) {
            out += static_cast<char>('1' + row);
            out += ' ';
            for (int col = 0; col < size_; ++col) {
                out += ".XO"[b.points[row * size_ + col]];
                out += ' ';
            }
            out += '\n';
        }
        out += "  ";
        for (int col = 0; col < size_; ++col) {
            out += static_cast<char>('A' + col);
            out += ' ';
        }
        out += '\n';
        return out;
    }

private:
    bool move_legal(const Board& b, int point) const {
        if (ko_ == KoRule::SimpleKo && point == b.ko_point) return false;
        GoBoard trial = b;
        int captured = go_detail::resolve_move(trial, point, to_move(b));
        if (captured < 0) return false;  // suicide
        if (ko_ == KoRule::PositionalSuperko) {
            std::uint64_t h = go_detail::position_hash(trial);
            if (std::binary_search(b.seen_positions.begin(), b.seen_positions.end(), h)) return false;
        }
        return true;
    }

    int size_;
    KoRule ko_;
    int ply_cap_;
};

static_assert(GameRules<GoGame>);

// Area score of a finished game; komi 0.
inline int minigo_score(const GoGame& game, const GoBoard& board) {
    if (game.outcome(board) == GameOutcome::Ongoing)
        throw GameOngoing("score requested before two passes / ply cap");
    return game.area_score(board);
}

}  // namespace pmcts
