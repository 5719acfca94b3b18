#pragma once

// Benchmark harness pieces shared by the CLI: the MatchRecord result row, a
// transcript replay audit, the MiniGo battle against a fixed vanilla-search
// opponent, and the full-chess match against an external UCI engine.
//
// MatchRecord serializes without wall-clock time on purpose: reruns with the
// same config, seeds, and replay-mode caches must produce bit-identical
// JSON-lines output. Timing goes to stderr summaries instead.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmcts/chess.hpp"
#include "pmcts/game.hpp"
#include "pmcts/go.hpp"
#include "pmcts/oracles.hpp"
#include "pmcts/search.hpp"
#include "pmcts/uci_client.hpp"

namespace pmcts {

struct MatchRecord {
    std::string game_id;
    nlohmann::json config;  // search config + oracle ids + seeds
    std::string start_key;  // board key of the game root
    std::vector<std::string> transcript;
    std::string result_kind;  // "puzzle" | "territory" | "score"
    bool solved = false;      // puzzle runs
    int territory = 0;        // minigo runs (Black minus White)
    double score = 0.0;       // chess matches: win 1, tie 1/2, lose 0
    std::string outcome;
    std::int64_t pruner_calls = 0;
    std::int64_t critic_calls = 0;
    double wall_ms = 0.0;  // not serialized

    nlohmann::json to_json() const {
        nlohmann::json j{{"game_id", game_id},
                         {"config", config},
                         {"start_key", start_key},
                         {"transcript", transcript},
                         {"result_kind", result_kind},
                         {"outcome", outcome},
                         {"pruner_calls", pruner_calls},
                         {"critic_calls", critic_calls}};
        if (result_kind == "puzzle") j["solved"] = solved;
        if (result_kind == "territory") j["territory"] = territory;
        if (result_kind == "score") j["score"] = score;
        return j;
    }
};

// Replays the transcript from the recorded root; throws on any illegal step.
// Returns the final state for result cross-checks.
template <GameRules G>
GameState<G> replay_transcript(const G& game, const MatchRecord& record) {
    GameState<G> state(game);
    if (state.board_key() != record.start_key)
        throw std::runtime_error("transcript root mismatch for " + record.game_id);
    for (const auto& text : record.transcript) state = state.apply_encoded(text);
    return state;
}

template <GameRules G>
using PrunerFactory = std::function<std::unique_ptr<Pruner<G>>(const G&)>;
template <GameRules G>
using CriticFactory = std::function<std::unique_ptr<Critic<G>>(const G&)>;

struct MinigoMatchConfig {
    int games = 20;
    SearchConfig agent;
    SearchConfig opponent;  // fixed vanilla searcher
    std::uint64_t seed = 0;

    MinigoMatchConfig() {
        agent.num_simulations = 50;
        // Depth never binds on a capped board: rollouts run to the game end.
        agent.max_depth = 128;
        opponent = agent;
        opponent.num_simulations = 1000;
    }
};

struct MinigoMatchResult {
    std::vector<MatchRecord> records;
    double mean_territory = 0.0;
};

// The agent plays Black (Max, the initiative); the opponent is a full-width
// search with the terminal-outcome critic.
inline MinigoMatchResult run_minigo_match(const GoGame& game,
                                          const PrunerFactory<GoGame>& agent_pruner,
                                          const CriticFactory<GoGame>& agent_critic,
                                          const MinigoMatchConfig& cfg) {
    MinigoMatchResult out;
    double total = 0.0;
    for (int g = 0; g < cfg.games; ++g) {
        auto pruner = agent_pruner(game);
        auto critic = agent_critic(game);
        IdentityPruner<GoGame> opp_pruner;
        OutcomeCritic<GoGame> opp_critic(1.0);
        SearchConfig agent_cfg = cfg.agent;
        SearchConfig opp_cfg = cfg.opponent;
        agent_cfg.rng_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(2 * g));
        opp_cfg.rng_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(2 * g + 1));

        MatchRecord record;
        record.game_id = "minigo-" + std::to_string(g);
        record.config = {{"agent", agent_cfg.to_json()},
                         {"opponent", opp_cfg.to_json()},
                         {"agent_pruner", pruner->id()},
                         {"agent_critic", critic->id()},
                         {"opponent_pruner", opp_pruner.id()},
                         {"opponent_critic", opp_critic.id()}};
        GameState<GoGame> state(game);
        record.start_key = state.board_key();
        while (!state.terminal()) {
            SearchResult<GoGame> result =
                state.turn() == PlayerRole::Max
                    ? run_search(game, state, agent_cfg, *pruner, *critic, PlayerRole::Max)
                    : run_search(game, state, opp_cfg, opp_pruner, opp_critic, PlayerRole::Min);
            record.pruner_calls += result.diagnostics.pruner_calls;
            record.critic_calls += result.diagnostics.critic_calls;
            record.transcript.push_back(result.best_action_encoded);
            state = state.apply(result.best_action);
        }
        record.result_kind = "territory";
        record.territory = minigo_score(game, state.board());
        record.outcome = to_string(state.outcome());
        total += record.territory;
        out.records.push_back(std::move(record));
    }
    out.mean_territory = cfg.games > 0 ? total / cfg.games : 0.0;
    return out;
}

struct ChessMatchConfig {
    int games = 1;
    int skill_level = 1;
    int movetime_ms = 100;
    int max_plies = 600;  // adjudicate as a draw beyond this
    SearchConfig agent;
    std::uint64_t seed = 0;

    ChessMatchConfig() {
        agent.num_simulations = 50;
        agent.max_depth = 10;
    }
};

struct ChessMatchResult {
    std::vector<MatchRecord> records;
    double mean_score = 0.0;  // win 1, tie 1/2, lose 0
};

// The agent plays White (Max, the initiative) against a UCI engine.
inline ChessMatchResult run_chess_match(const std::string& engine_command,
                                        const PrunerFactory<ChessGame>& agent_pruner,
                                        const CriticFactory<ChessGame>& agent_critic,
                                        const ChessMatchConfig& cfg) {
    ChessMatchResult out;
    UciEngine engine(engine_command);
    engine.handshake();
    engine.set_skill_level(cfg.skill_level);
    ChessGame game;  // standard initial position, White = Max
    double total = 0.0;
    for (int g = 0; g < cfg.games; ++g) {
        auto pruner = agent_pruner(game);
        auto critic = agent_critic(game);
        SearchConfig agent_cfg = cfg.agent;
        agent_cfg.rng_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(g));
        engine.new_game();

        MatchRecord record;
        record.game_id = "chess-" + std::to_string(g);
        record.config = {{"agent", agent_cfg.to_json()},
                         {"agent_pruner", pruner->id()},
                         {"agent_critic", critic->id()},
                         {"engine", engine_command},
                         {"skill_level", cfg.skill_level},
                         {"movetime_ms", cfg.movetime_ms}};
        GameState<ChessGame> state(game);
        record.start_key = state.board_key();
        std::string root_fen = record.start_key;
        bool adjudicated = false;
        while (!state.terminal()) {
            if (static_cast<int>(state.ply()) >= cfg.max_plies) {
                adjudicated = true;
                break;
            }
            if (state.turn() == PlayerRole::Max) {
                auto result = run_search(game, state, agent_cfg, *pruner, *critic, PlayerRole::Max);
                record.pruner_calls += result.diagnostics.pruner_calls;
                record.critic_calls += result.diagnostics.critic_calls;
                record.transcript.push_back(result.best_action_encoded);
                state = state.apply(result.best_action);
            } else {
                std::string reply = engine.best_move(root_fen, record.transcript, cfg.movetime_ms);
                auto action = game.decode_action(state.board(), reply);
                if (!action || !state.is_legal(*action))
                    throw EngineProtocolError("illegal engine move " + reply + " at " +
                                              state.board_key());
                record.transcript.push_back(reply);
                state = state.apply(*action);
            }
        }
        record.result_kind = "score";
        GameOutcome o = adjudicated ? GameOutcome::Draw : state.outcome();
        record.outcome = adjudicated ? "adjudicated_draw" : to_string(o);
        record.score = o == GameOutcome::MaxWins ? 1.0 : o == GameOutcome::Draw ? 0.5 : 0.0;
        total += record.score;
        out.records.push_back(std::move(record));
    }
    out.mean_score = cfg.games > 0 ? total / cfg.games : 0.0;
    return out;
}

}  // namespace pmcts
