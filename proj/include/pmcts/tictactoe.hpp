#pragma once

// 3x3 tic-tac-toe. Small enough to solve exactly, which makes it the main
// ground-truth game for search convergence and pruning-bound tests.
// X moves first and is the Max player. Actions are cell indices "0".."8",
// row-major from the top-left.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pmcts/game.hpp"

namespace pmcts {

class TicTacToe {
public:
    struct Board {
        std::array<char, 9> cells{'.', '.', '.', '.', '.', '.', '.', '.', '.'};
        bool operator==(const Board&) const = default;
    };
    using Action = int;

    std::string name() const { return "tictactoe"; }

    Board initial_board() const { return Board{}; }

    std::vector<Action> legal_actions(const Board& b) const {
        std::vector<Action> actions;
        if (winner(b) != '.') return actions;
        for (int i = 0; i < 9; ++i)
            if (b.cells[i] == '.') actions.push_back(i);
        return actions;
    }

    Board apply(const Board& b, Action a) const {
        Board next = b;
        next.cells[a] = side_to_move(b);
        return next;
    }

    GameOutcome outcome(const Board& b) const {
        char w = winner(b);
        if (w == 'X') return GameOutcome::MaxWins;
        if (w == 'O') return GameOutcome::MinWins;
        for (char c : b.cells)
            if (c == '.') return GameOutcome::Ongoing;
        return GameOutcome::Draw;
    }

    double expected_reward(const Board&, Action) const { return 0.0; }
    double reward_bound() const { return 0.0; }

    std::string encode_action(Action a) const { return std::string(1, static_cast<char>('0' + a)); }

    std::optional<Action> decode_action(const Board& b, std::string_view text) const {
        if (text.size() != 1 || text[0] < '0' || text[0] > '8') return std::nullopt;
        (void)b;
        return text[0] - '0';
    }

    std::string board_key(const Board& b) const {
        std::string key(b.cells.begin(), b.cells.end());
        key += side_to_move(b);
        return key;
    }

    // The board fully determines the subgame (no repetition rules, parity is
    // implied by the mark counts), so the board key is a sound Markov key.
    std::string solver_key(const Board& b) const { return board_key(b); }

    static char side_to_move(const Board& b) {
        int x = 0, o = 0;
        for (char c : b.cells) {
            x += c == 'X';
            o += c == 'O';
        }
        return x == o ? 'X' : 'O';
    }

    static char winner(const Board& b) {
        static constexpr int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                            {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
        for (const auto& line : lines) {
            char c = b.cells[line[0]];
            if (c != '.' && c == b.cells[line[1]] && c == b.cells[line[2]]) return c;
        }
        return '.';
    }
};

static_assert(GameRules<TicTacToe>);

}  // namespace pmcts
