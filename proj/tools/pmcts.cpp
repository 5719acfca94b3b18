// Command-line surface: puzzle solving, MiniGo battles, full-chess matches
// against a UCI engine, single-position value estimation, bandit simulation,
// bound verification, and perft. Results go to JSON-lines (one MatchRecord
// per line) plus a CSV summary; timing is reported on stderr only so reruns
// with the same seeds are bit-identical.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmcts/bandit.hpp"
#include "pmcts/chess.hpp"
#include "pmcts/exact.hpp"
#include "pmcts/go.hpp"
#include "pmcts/llm.hpp"
#include "pmcts/match.hpp"
#include "pmcts/oracles.hpp"
#include "pmcts/puzzles.hpp"
#include "pmcts/random_reward_game.hpp"
#include "pmcts/search.hpp"
#include "pmcts/tictactoe.hpp"

using namespace pmcts;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    std::int64_t sims = 50;
    int depth = 10;
    double gamma = 0.99;
    std::string pruner = "identity";
    std::string critic = "outcome";
    std::string llm_mode = "replay";
    std::string out_path;
    int jobs = 1;
    int cheat_width = 5;

    json config;  // parsed --config file, {} when absent

    void load_config() {
        if (config_path.empty()) {
            config = json::object();
            return;
        }
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config: " + config_path);
        in >> config;
    }

    SearchConfig search_config() const {
        SearchConfig cfg;
        cfg.num_simulations = sims;
        cfg.max_depth = depth;
        cfg.gamma = gamma;
        cfg.rng_seed = seed;
        if (config.contains("search")) {
            const json& s = config.at("search");
            if (s.contains("bonus")) {
                const json& b = s.at("bonus");
                if (b.contains("beta")) cfg.bonus.beta = b.at("beta").get<std::vector<double>>();
                if (b.contains("eta1")) cfg.bonus.eta1 = b.at("eta1").get<double>();
                if (b.contains("eta2")) cfg.bonus.eta2 = b.at("eta2").get<double>();
            }
            if (s.contains("terminal_value_scale"))
                cfg.terminal_value_scale = s.at("terminal_value_scale").get<double>();
        }
        return cfg;
    }

    std::shared_ptr<LlmClient> llm_client() const {
        LlmConfig c = config.contains("llm") ? LlmConfig::from_json(config.at("llm")) : LlmConfig{};
        c.mode = llm_mode_from_string(llm_mode);
        return std::make_shared<LlmClient>(c);
    }

    PromptTemplates prompts() const {
        return config.contains("prompts") ? PromptTemplates::from_json(config.at("prompts"))
                                          : PromptTemplates{};
    }
};

template <GameRules G>
PrunerFactory<G> make_pruner_factory(const GlobalOptions& opts) {
    if (opts.pruner == "identity")
        return [](const G&) { return std::make_unique<IdentityPruner<G>>(); };
    if (opts.pruner == "mock") {
        std::map<std::string, std::vector<std::string>> table;
        if (opts.config.contains("mock_pruner"))
            table = opts.config.at("mock_pruner")
                        .get<std::map<std::string, std::vector<std::string>>>();
        return [table](const G&) { return std::make_unique<MockPruner<G>>(table); };
    }
    if (opts.pruner == "cheat") {
        int k = opts.cheat_width;
        std::uint64_t seed = opts.seed;
        return [k, seed](const G&) {
            return std::make_unique<CheatPruner<G>>(std::map<std::string, std::string>{}, k, seed);
        };
    }
    if (opts.pruner == "llm") {
        auto client = opts.llm_client();
        auto templates = opts.prompts();
        int k = opts.cheat_width;
        return [client, templates, k](const G&) {
            return std::make_unique<LlmPruner<G>>(client, templates, k);
        };
    }
    throw CLI::ValidationError("--pruner", "unknown pruner: " + opts.pruner);
}

template <GameRules G>
CriticFactory<G> make_critic_factory(const GlobalOptions& opts) {
    if (opts.critic == "outcome")
        return [](const G&) { return std::make_unique<OutcomeCritic<G>>(1.0); };
    if (opts.critic == "llm") {
        auto client = opts.llm_client();
        auto templates = opts.prompts();
        return [client, templates](const G&) {
            return std::make_unique<LlmCritic<G>>(client, templates);
        };
    }
    if (opts.critic == "material" || opts.critic == "hybrid") {
        if constexpr (std::is_same_v<G, ChessGame>) {
            if (opts.critic == "material")
                return [](const G&) { return std::make_unique<MaterialCritic>(); };
            auto client = opts.llm_client();
            auto templates = opts.prompts();
            return [client, templates](const G&) {
                return std::make_unique<HybridCritic<G>>(
                    std::make_shared<MaterialCritic>(),
                    std::make_shared<LlmCritic<G>>(client, templates));
            };
        } else {
            throw UnsupportedGame("critic '" + opts.critic + "' needs a chess game");
        }
    }
    if (opts.critic == "exact") {
        if constexpr (std::is_same_v<G, TicTacToe>) {
            double gamma = opts.gamma;
            return [gamma](const G& game) {
                GameState<G> root(game);
                auto solution =
                    std::make_shared<const ExactSolution>(solve_exact(game, root, gamma));
                return std::make_unique<ExactCritic<G>>(solution);
            };
        } else {
            throw UnsupportedGame("exact critic only fits exactly solvable games (tictactoe)");
        }
    }
    throw CLI::ValidationError("--critic", "unknown critic: " + opts.critic);
}

void write_records(const GlobalOptions& opts, const std::vector<MatchRecord>& records,
                   const std::string& summary_header, const std::vector<std::string>& summary_rows) {
    if (opts.out_path.empty()) {
        for (const auto& r : records) std::cout << r.to_json().dump() << "\n";
        return;
    }
    std::ofstream out(opts.out_path);
    if (!out) throw std::runtime_error("cannot open output: " + opts.out_path);
    for (const auto& r : records) out << r.to_json().dump() << "\n";
    std::ofstream csv(opts.out_path + ".summary.csv");
    csv << summary_header << "\n";
    for (const auto& row : summary_rows) csv << row << "\n";
    std::cerr << "wrote " << records.size() << " records to " << opts.out_path << "\n";
}

// Board-key -> next line move for every position along the puzzle line; the
// stand-in for an oracle that knows strong moves at on-line states.
std::map<std::string, std::string> line_solution_map(const Puzzle& puzzle) {
    std::map<std::string, std::string> map;
    ChessGame pre(puzzle.fen);
    GameState<ChessGame> state(pre);
    state = state.apply_encoded(puzzle.moves.at(0));
    for (std::size_t i = 1; i < puzzle.moves.size(); ++i) {
        map[state.board_key()] = puzzle.moves[i];
        state = state.apply_encoded(puzzle.moves[i]);
    }
    return map;
}

int cmd_solve_puzzles(GlobalOptions& opts, const std::string& csv_path, const std::string& theme,
                      int puzzle_depth, int min_rating, long limit) {
    PuzzleFilter filter;
    filter.theme = theme;
    filter.depth = puzzle_depth;
    filter.min_rating = min_rating;
    filter.limit = limit;
    auto loaded = load_puzzles(csv_path, filter);
    std::cerr << "loaded " << loaded.puzzles.size() << " puzzles (" << loaded.skipped
              << " skipped)\n";

    SearchConfig cfg = opts.search_config();
    auto critic_factory = make_critic_factory<ChessGame>(opts);

    std::vector<MatchRecord> records(loaded.puzzles.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= loaded.puzzles.size()) return;
            const Puzzle& p = loaded.puzzles[i];
            PrunerFactory<ChessGame> pruner_factory;
            if (opts.pruner == "cheat") {
                auto map = line_solution_map(p);
                int k = opts.cheat_width;
                std::uint64_t seed = opts.seed;
                pruner_factory = [map, k, seed](const ChessGame&) {
                    return std::make_unique<CheatPruner<ChessGame>>(map, k, seed);
                };
            } else {
                pruner_factory = make_pruner_factory<ChessGame>(opts);
            }
            records[i] = run_puzzle(p, cfg, pruner_factory, critic_factory);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < opts.jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::map<int, std::pair<int, int>> by_depth;  // depth -> (total, solved)
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& [total, solved] = by_depth[loaded.puzzles[i].depth];
        ++total;
        solved += records[i].solved;
    }
    std::vector<std::string> rows;
    int total = 0, solved = 0;
    for (const auto& [d, counts] : by_depth) {
        rows.push_back(std::to_string(d) + "," + std::to_string(counts.first) + "," +
                       std::to_string(counts.second) + "," +
                       std::to_string(counts.first ? static_cast<double>(counts.second) /
                                                         counts.first
                                                   : 0.0));
        total += counts.first;
        solved += counts.second;
    }
    write_records(opts, records, "depth,total,solved,solve_rate", rows);
    std::cerr << "solved " << solved << "/" << total << "\n";
    return 0;
}

int cmd_play_minigo(GlobalOptions& opts, int games, std::int64_t opponent_sims, int board_size) {
    GoGame game(board_size);
    MinigoMatchConfig cfg;
    cfg.games = games;
    cfg.seed = opts.seed;
    cfg.agent = opts.search_config();
    cfg.agent.max_depth = std::max(cfg.agent.max_depth, game.ply_cap());  // rollouts to game end
    cfg.opponent = cfg.agent;
    cfg.opponent.num_simulations = opponent_sims;
    auto result = run_minigo_match(game, make_pruner_factory<GoGame>(opts),
                                   make_critic_factory<GoGame>(opts), cfg);
    std::vector<std::string> rows;
    for (const auto& r : result.records)
        rows.push_back(r.game_id + "," + std::to_string(r.territory));
    rows.push_back("mean," + std::to_string(result.mean_territory));
    write_records(opts, result.records, "game,territory", rows);
    std::cerr << "mean territory: " << result.mean_territory << "\n";
    return 0;
}

int cmd_play_chess(GlobalOptions& opts, const std::string& engine, int level, int games,
                   int movetime) {
    ChessMatchConfig cfg;
    cfg.games = games;
    cfg.skill_level = level;
    cfg.movetime_ms = movetime;
    cfg.seed = opts.seed;
    cfg.agent = opts.search_config();
    auto result = run_chess_match(engine, make_pruner_factory<ChessGame>(opts),
                                  make_critic_factory<ChessGame>(opts), cfg);
    std::vector<std::string> rows;
    for (const auto& r : result.records)
        rows.push_back(r.game_id + "," + std::to_string(r.score) + "," + r.outcome);
    rows.push_back("mean," + std::to_string(result.mean_score) + ",");
    write_records(opts, result.records, "game,score,outcome", rows);
    std::cerr << "match score: " << result.mean_score << "\n";
    return 0;
}

int cmd_estimate_value(GlobalOptions& opts, const std::string& game_name, const std::string& fen) {
    SearchConfig cfg = opts.search_config();
    json output;
    if (game_name == "chess") {
        ChessGame game = fen.empty() ? ChessGame() : ChessGame(fen);
        GameState<ChessGame> root(game);
        auto pruner = make_pruner_factory<ChessGame>(opts)(game);
        auto critic = make_critic_factory<ChessGame>(opts)(game);
        output = run_search(game, root, cfg, *pruner, *critic, root.turn()).to_json();
    } else if (game_name == "minigo") {
        GoGame game(5);
        GameState<GoGame> root(game);
        auto pruner = make_pruner_factory<GoGame>(opts)(game);
        auto critic = make_critic_factory<GoGame>(opts)(game);
        output = run_search(game, root, cfg, *pruner, *critic, root.turn()).to_json();
    } else if (game_name == "tictactoe") {
        TicTacToe game;
        GameState<TicTacToe> root(game);
        auto pruner = make_pruner_factory<TicTacToe>(opts)(game);
        auto critic = make_critic_factory<TicTacToe>(opts)(game);
        output = run_search(game, root, cfg, *pruner, *critic, root.turn()).to_json();
    } else {
        throw CLI::ValidationError("--game", "unknown game: " + game_name);
    }
    if (opts.out_path.empty()) {
        std::cout << output.dump(2) << "\n";
    } else {
        std::ofstream out(opts.out_path);
        out << output.dump() << "\n";
    }
    return 0;
}

int cmd_bandit_sim(GlobalOptions& opts, const std::string& arm_means, const std::string& role_name,
                   std::int64_t steps, double alpha, double beta, double xi, double noise) {
    std::vector<BanditArm> arms;
    std::istringstream ss(arm_means);
    std::string tok;
    double bound = 0.0;
    while (std::getline(ss, tok, ',')) {
        BanditArm arm;
        arm.limit_mean = std::stod(tok);
        if (noise > 0) {
            arm.kind = BanditArm::Kind::UniformNoise;
            arm.param = noise;
        }
        bound = std::max(bound, std::abs(arm.limit_mean) + noise);
        arms.push_back(arm);
    }
    BanditEnv env(arms, bound);
    UcbParams params{alpha, beta, xi};
    PlayerRole role = role_name == "min" ? PlayerRole::Min : PlayerRole::Max;
    auto trace = simulate_bandit(env, steps, params, role, opts.seed);
    if (opts.out_path.empty()) {
        trace.to_csv(std::cout);
    } else {
        std::ofstream out(opts.out_path);
        trace.to_csv(out);
    }
    std::cerr << "final mean " << trace.final_mean() << ", pulls:";
    for (auto c : trace.pull_counts) std::cerr << ' ' << c;
    std::cerr << "\n";
    return 0;
}

int cmd_verify_bounds(GlobalOptions& opts, bool fast) {
    json report;
    bool ok = true;

    {  // soft-max vs max inequality on random draws
        std::mt19937_64 rng(opts.seed ^ 0xabcdef);
        int draws = fast ? 1000 : 10000;
        int violations = 0;
        for (int i = 0; i < draws; ++i) {
            std::size_t n = 1 + rand_index(rng, 32);
            std::vector<double> values(n);
            for (auto& v : values) v = 20.0 * rand_unit(rng) - 10.0;
            double tau = std::exp(6.0 * rand_unit(rng) - 2.0);
            double m = *std::max_element(values.begin(), values.end());
            double gap = m - lse(values, tau);
            if (!(gap >= -1e-9 && gap <= std::log(static_cast<double>(n)) / tau + 1e-9))
                ++violations;
        }
        report["lse"] = {{"draws", draws}, {"violations", violations}};
        ok = ok && violations == 0;
    }

    std::vector<double> taus{1.0, 10.0, 100.0};
    json fixtures = json::array();
    auto run_fixture = [&](const std::string& name, auto&& game, double gamma, int pruners) {
        using G = std::decay_t<decltype(game)>;
        GameState<G> root(game);
        for (int i = 0; i < pruners; ++i) {
            RandomSubsetPruner<G> pruner(0.4 + 0.1 * i, mix_seed(opts.seed, i));
            auto rep = check_pruning_bound(game, root, gamma, pruner, taus);
            json j = rep.to_json();
            j["fixture"] = name;
            j["pruner_seed"] = i;
            fixtures.push_back(j);
            ok = ok && rep.ok();
        }
    };
    run_fixture("random_reward", RandomRewardGame(4, 6, 77, 1.0), 0.5, fast ? 1 : 5);
    run_fixture("tictactoe", TicTacToe(), 0.99, fast ? 1 : 5);
    if (!fast) run_fixture("go3_capped", GoGame(3, KoRule::SimpleKo, 12), 0.9, 5);
    report["pruning_bound"] = fixtures;

    {
        auto mb = magnitude_bounds(1.0, 0.5, 0.0, 4);
        report["magnitude_bounds"] = {{"v_max", mb.v_max}, {"levels", mb.level_bound}};
    }
    report["ok"] = ok;

    if (opts.out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(opts.out_path);
        out << report.dump() << "\n";
    }
    std::cerr << (ok ? "all bounds hold\n" : "BOUND VIOLATIONS FOUND\n");
    return ok ? 0 : 1;
}

int cmd_perft(const std::string& fen, int depth) {
    ChessGame game = fen.empty() ? ChessGame() : ChessGame(fen);
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t nodes = perft(game, game.initial_board(), depth);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << nodes << "\n";
    std::cerr << "depth " << depth << ": " << nodes << " nodes in " << ms << "ms\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Search engine and benchmark harness for two-player zero-sum games"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "JSON config file");
    app.add_option("--seed", opts.seed, "RNG seed");
    app.add_option("--sims", opts.sims, "simulations per search");
    app.add_option("--depth", opts.depth, "search depth in full steps");
    app.add_option("--gamma", opts.gamma, "discount factor");
    app.add_option("--pruner", opts.pruner, "identity|mock|cheat|llm");
    app.add_option("--critic", opts.critic, "outcome|material|hybrid|llm|exact");
    app.add_option("--llm-mode", opts.llm_mode, "live|cached-live|replay");
    app.add_option("--out", opts.out_path, "output path (JSON lines)");
    app.add_option("--jobs", opts.jobs, "worker threads");
    app.add_option("--cheat-width", opts.cheat_width, "pruned width for cheat/llm pruners");
    app.fallthrough();

    std::string csv_path, theme, game_name = "chess", fen, engine, arm_means = "1,0",
                           role_name = "max";
    int puzzle_depth = 0, min_rating = 0, level = 1, games = 20, movetime = 100, board_size = 5,
        pft_depth = 1;
    long limit = 0;
    std::int64_t opponent_sims = 1000, steps = 1000;
    double alpha = 2.5, bandit_beta = 1.1, xi = 10.0, noise = 0.0;
    bool fast = false;

    auto* solve = app.add_subcommand("solve-puzzles", "run a lichess puzzle set");
    solve->add_option("--csv", csv_path, "puzzle CSV path")->required();
    solve->add_option("--theme", theme, "theme filter, e.g. mateIn3");
    solve->add_option("--puzzle-depth", puzzle_depth, "exact depth filter");
    solve->add_option("--min-rating", min_rating, "minimum rating");
    solve->add_option("--limit", limit, "keep the N highest-rated");

    auto* minigo = app.add_subcommand("play-minigo", "battle a fixed vanilla-search opponent");
    minigo->add_option("--games", games, "number of games");
    minigo->add_option("--opponent-sims", opponent_sims, "opponent simulations");
    minigo->add_option("--board-size", board_size, "board size");

    auto* chess = app.add_subcommand("play-chess", "match against a UCI engine");
    chess->add_option("--engine", engine, "UCI engine command")->required();
    chess->add_option("--level", level, "engine Skill Level");
    chess->add_option("--games", games, "number of games");
    chess->add_option("--movetime", movetime, "engine movetime (ms)");

    auto* estimate = app.add_subcommand("estimate-value", "search one position, print the result");
    estimate->add_option("--game", game_name, "tictactoe|minigo|chess");
    estimate->add_option("--fen", fen, "chess FEN (default: initial position)");

    auto* bandit = app.add_subcommand("bandit-sim", "run the UCB bandit, emit a CSV trace");
    bandit->add_option("--arms", arm_means, "comma-separated limit means");
    bandit->add_option("--steps", steps, "total pulls");
    bandit->add_option("--alpha", alpha, "bonus exponent alpha");
    bandit->add_option("--beta", bandit_beta, "bonus coefficient beta");
    bandit->add_option("--xi", xi, "bonus exponent xi");
    bandit->add_option("--role", role_name, "max|min");
    bandit->add_option("--noise", noise, "uniform noise half-width");

    auto* verify = app.add_subcommand("verify-bounds", "run the inequality suites");
    verify->add_flag("--fast", fast, "reduced fixture set");

    auto* pft = app.add_subcommand("perft", "legal-move tree leaf count");
    pft->add_option("--fen", fen, "FEN (default: initial position)");
    pft->add_option("--depth", pft_depth, "plies");

    CLI11_PARSE(app, argc, argv);

    try {
        opts.load_config();
        if (solve->parsed())
            return cmd_solve_puzzles(opts, csv_path, theme, puzzle_depth, min_rating, limit);
        if (minigo->parsed()) return cmd_play_minigo(opts, games, opponent_sims, board_size);
        if (chess->parsed()) return cmd_play_chess(opts, engine, level, games, movetime);
        if (estimate->parsed()) return cmd_estimate_value(opts, game_name, fen);
        if (bandit->parsed())
            return cmd_bandit_sim(opts, arm_means, role_name, steps, alpha, bandit_beta, xi, noise);
        if (verify->parsed()) return cmd_verify_bounds(opts, fast);
        if (pft->parsed()) return cmd_perft(fen, pft_depth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
