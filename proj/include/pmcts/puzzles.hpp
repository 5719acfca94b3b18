#pragma once

// Lichess puzzle ingestion and the scripted puzzle runner.
//
// CSV schema (header-checked):
//   PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl,OpeningTags
// Moves[0] is the opponent's move INTO the puzzle position; the agent's clock
// starts after applying it. A puzzle's depth is its number of agent moves.
// Rows that fail validation (illegal replay, no final mate, theme/depth
// mismatch) are skipped and counted, not fatal.

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pmcts/chess.hpp"
#include "pmcts/match.hpp"
#include "pmcts/oracles.hpp"
#include "pmcts/search.hpp"

namespace pmcts {

struct SchemaError : std::runtime_error {
    long row;
    std::string column;
    SchemaError(long row_number, const std::string& column_name, const std::string& why)
        : std::runtime_error("csv schema error at row " + std::to_string(row_number) + ", column " +
                             column_name + ": " + why),
          row(row_number),
          column(column_name) {}
};

struct Puzzle {
    std::string id;
    std::string fen;                  // position before the opponent's lead move
    std::vector<std::string> moves;   // UCI; moves[0] is the opponent's
    int depth = 0;                    // agent moves in the line
    int rating = 0;
    std::vector<std::string> themes;
};

namespace puzzle_detail {

// RFC-4180-ish row splitter with quoted fields.
inline bool read_csv_row(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string word;
    while (ss >> word) out.push_back(word);
    return out;
}

}  // namespace puzzle_detail

struct PuzzleFilter {
    std::string theme;   // empty: any
    int depth = 0;       // 0: any
    int min_rating = 0;
    long limit = 0;      // 0: no limit
};

struct PuzzleLoadResult {
    std::vector<Puzzle> puzzles;  // rating-descending, truncated to the limit
    long skipped = 0;
    std::vector<std::string> skipped_ids;
};

const std::vector<std::string> LICHESS_PUZZLE_HEADER = {
    "PuzzleId", "FEN",     "Moves",   "Rating",  "RatingDeviation",
    "Popularity", "NbPlays", "Themes", "GameUrl", "OpeningTags"};

// Validates the whole line by replay: every move legal, the final position a
// checkmate delivered by the agent, and the mateInN theme matching the depth.
inline bool validate_puzzle(const Puzzle& p) {
    try {
        if (p.moves.size() < 2 || p.moves.size() % 2 != 0) return false;
        ChessGame game(p.fen);
        GameState<ChessGame> state(game);
        for (const auto& text : p.moves) state = state.apply_encoded(text);
        GameOutcome final = state.outcome();
        // The agent moves second from the pre-lead FEN; with the root side
        // mapped to Max, the agent is the Min role of that replay game, so a
        // win for the agent reads MinWins here.
        if (final != GameOutcome::MinWins) return false;
        std::string want = "mateIn" + std::to_string(std::min(p.depth, 5));
        bool tagged = false;
        for (const auto& t : p.themes) tagged = tagged || t == want;
        return tagged;
    } catch (const std::exception&) {
        return false;
    }
}

inline PuzzleLoadResult load_puzzles(std::istream& in, const PuzzleFilter& filter) {
    std::vector<std::string> fields;
    if (!puzzle_detail::read_csv_row(in, fields))
        throw SchemaError(1, "header", "empty file");
    if (fields != LICHESS_PUZZLE_HEADER)
        throw SchemaError(1, fields.empty() ? "header" : fields[0], "header does not match the lichess puzzle schema");

    PuzzleLoadResult out;
    long row = 1;
    while (puzzle_detail::read_csv_row(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != LICHESS_PUZZLE_HEADER.size())
            throw SchemaError(row, "row", "expected " + std::to_string(LICHESS_PUZZLE_HEADER.size()) +
                                              " fields, got " + std::to_string(fields.size()));
        Puzzle p;
        p.id = fields[0];
        p.fen = fields[1];
        p.moves = puzzle_detail::split_ws(fields[2]);
        try {
            p.rating = std::stoi(fields[3]);
        } catch (const std::exception&) {
            throw SchemaError(row, "Rating", "not an integer: " + fields[3]);
        }
        {
            std::istringstream themes(fields[7]);
            std::string t;
            while (themes >> t) p.themes.push_back(t);
        }
        p.depth = static_cast<int>(p.moves.size() / 2);

        if (!filter.theme.empty() &&
            std::find(p.themes.begin(), p.themes.end(), filter.theme) == p.themes.end())
            continue;
        if (filter.depth != 0 && p.depth != filter.depth) continue;
        if (p.rating < filter.min_rating) continue;

        if (!validate_puzzle(p)) {
            ++out.skipped;
            out.skipped_ids.push_back(p.id);
            continue;
        }
        out.puzzles.push_back(std::move(p));
    }
    std::stable_sort(out.puzzles.begin(), out.puzzles.end(), [](const Puzzle& a, const Puzzle& b) {
        if (a.rating != b.rating) return a.rating > b.rating;
        return a.id < b.id;
    });
    if (filter.limit > 0 && static_cast<long>(out.puzzles.size()) > filter.limit)
        out.puzzles.resize(static_cast<std::size_t>(filter.limit));
    return out;
}

inline PuzzleLoadResult load_puzzles(const std::string& path, const PuzzleFilter& filter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open puzzle csv: " + path);
    return load_puzzles(in, filter);
}

// The agent's game starts after the opponent's lead move, with the agent as
// the Max player. At each agent turn the search proposes a move; the scripted
// opponent answers with the next line move as long as the agent stays on the
// line. A deviation only counts as solved when the deviating move itself
// delivers mate within the move budget.
inline MatchRecord run_puzzle(const Puzzle& puzzle, const SearchConfig& config,
                              const PrunerFactory<ChessGame>& pruner_factory,
                              const CriticFactory<ChessGame>& critic_factory) {
    ChessGame pre_game(puzzle.fen);
    GameState<ChessGame> pre(pre_game);
    pre = pre.apply_encoded(puzzle.moves.at(0));
    ChessGame game(pre.board_key());  // re-rooted: the agent is Max

    auto pruner = pruner_factory(game);
    auto critic = critic_factory(game);

    MatchRecord record;
    record.game_id = puzzle.id;
    record.config = {{"search", config.to_json()},
                     {"pruner", pruner->id()},
                     {"critic", critic->id()},
                     {"puzzle_depth", puzzle.depth},
                     {"lead_move", puzzle.moves.at(0)},
                     {"pre_fen", puzzle.fen}};
    record.result_kind = "puzzle";

    GameState<ChessGame> state(game);
    record.start_key = state.board_key();
    int agent_moves = 0;
    for (std::size_t i = 1; i < puzzle.moves.size(); i += 2) {
        auto result = run_search(game, state, config, *pruner, *critic, PlayerRole::Max);
        record.pruner_calls += result.diagnostics.pruner_calls;
        record.critic_calls += result.diagnostics.critic_calls;
        std::string chosen = result.best_action_encoded;
        record.transcript.push_back(chosen);
        state = state.apply(result.best_action);
        ++agent_moves;
        if (state.outcome() == GameOutcome::MaxWins && agent_moves <= puzzle.depth) {
            record.solved = true;
            break;
        }
        if (chosen != puzzle.moves[i]) break;  // off the line without a mate
        if (i + 1 < puzzle.moves.size()) {
            record.transcript.push_back(puzzle.moves[i + 1]);
            state = state.apply_encoded(puzzle.moves[i + 1]);
        }
    }
    record.outcome = to_string(state.outcome());
    return record;
}

}  // namespace pmcts
