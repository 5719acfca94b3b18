#pragma once

// Monte-Carlo tree search over a pruned action space with a polynomial UCB
// bonus and half-step discounting.
//
// Each simulation rolls out up to `max_depth` full steps (two plies each) from
// the root. At a node the acting player picks among the pruned candidates:
// unvisited candidates first (canonical order), otherwise the Max player
// maximizes  mean + beta * N(parent)^eta1 / N(child)^eta2  and the Min player
// minimizes  mean - bonus. Rollouts stop early at terminal states, whose
// outcome value stands in for the critic. The backward update accumulates the
// per-visit return G into every node and edge on the path; the discount
// multiplies the child return exactly on edges where the game's Min player
// acted, so with zero rewards and a constant leaf value v the root converges
// to gamma^H * v.
//
// The tree is rebuilt per call, one node per action history; transpositions
// stay distinct. A search instance is single-threaded; independent searches
// may run concurrently.

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmcts/game.hpp"

namespace pmcts {

struct NoActions : std::runtime_error {
    explicit NoActions(const std::string& what) : std::runtime_error("no actions: " + what) {}
};

struct PrunerFailure : std::runtime_error {
    explicit PrunerFailure(const std::string& what) : std::runtime_error("pruner failure: " + what) {}
};

struct CriticFailure : std::runtime_error {
    explicit CriticFailure(const std::string& what) : std::runtime_error("critic failure: " + what) {}
};

// Exploration-bonus parameters. `beta` holds either one shared coefficient or
// a per-level schedule indexed by plies from the root (0 = root decision,
// 1 = the half step after it, ...); a schedule shorter than the tree depth
// extends with its last entry.
struct BonusParams {
    std::vector<double> beta{1.25};
    double eta1 = 0.5;
    double eta2 = 0.5;

    bool shared() const { return beta.size() == 1; }

    double beta_at(std::size_t level) const {
        if (beta.empty()) throw std::invalid_argument("BonusParams: empty beta schedule");
        return level < beta.size() ? beta[level] : beta.back();
    }

    void validate() const {
        if (beta.empty()) throw std::invalid_argument("BonusParams: empty beta schedule");
        for (double b : beta)
            if (!(b > 0)) throw std::invalid_argument("BonusParams: beta must be positive");
        if (!(eta1 > 0 && eta1 < 1)) throw std::invalid_argument("BonusParams: eta1 in (0,1)");
        if (!(eta2 > 0 && eta2 <= 1)) throw std::invalid_argument("BonusParams: eta2 in (0,1]");
    }

    // beta = 1.25, eta1 = eta2 = 1/2.
    static BonusParams experiments() { return BonusParams{}; }
    // eta1 = 1/4, eta2 = 1/2; beta kept at the experiments value.
    static BonusParams theory() { return BonusParams{{1.25}, 0.25, 0.5}; }

    nlohmann::json to_json() const {
        return {{"beta", beta}, {"eta1", eta1}, {"eta2", eta2}};
    }
};

inline double ucb_bonus(const BonusParams& params, std::size_t level, std::int64_t n_parent,
                        std::int64_t n_child) {
    return params.beta_at(level) * std::pow(static_cast<double>(n_parent), params.eta1) /
           std::pow(static_cast<double>(n_child), params.eta2);
}

struct SearchConfig {
    std::int64_t num_simulations = 50;
    int max_depth = 10;  // full steps; a rollout spans at most 2*max_depth plies
    double gamma = 0.99;
    BonusParams bonus;
    std::uint64_t rng_seed = 0;
    double terminal_value_scale = 1.0;  // outcome value substituted for the critic

    void validate() const {
        if (num_simulations < 1) throw std::invalid_argument("SearchConfig: num_simulations >= 1");
        if (max_depth < 1) throw std::invalid_argument("SearchConfig: max_depth >= 1");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("SearchConfig: gamma in [0,1)");
        bonus.validate();
    }

    nlohmann::json to_json() const {
        return {{"num_simulations", num_simulations}, {"max_depth", max_depth},
                {"gamma", gamma},                     {"bonus", bonus.to_json()},
                {"rng_seed", rng_seed},               {"terminal_value_scale", terminal_value_scale}};
    }
};

// Action-space pruner contract: a non-empty ordered subset of the legal
// actions, deterministic given state (and construction seed).
template <GameRules G>
class Pruner {
public:
    virtual ~Pruner() = default;
    virtual std::vector<typename G::Action> prune(const GameState<G>& state) = 0;
    virtual std::string id() const = 0;
    virtual int max_width() const { return -1; }  // -1: unbounded
};

// Leaf-value critic contract: an estimate of the optimal value, always from
// the Max player's perspective, deterministic given state.
template <GameRules G>
class Critic {
public:
    virtual ~Critic() = default;
    virtual double evaluate(const GameState<G>& state) = 0;
    virtual std::string id() const = 0;
};

// One step of a rollout path for the backward update. `discounted` marks
// edges on which the game's Min player acted.
struct PathStep {
    double reward = 0.0;
    bool discounted = false;
};

// Per-edge returns of one simulation, root edge first:
//   G_last = reward_last + d_last * leaf_value, ... G_i = reward_i + d_i * G_{i+1}
// with d_i = gamma on discounted edges and 1 otherwise.
inline std::vector<double> backup_returns(const std::vector<PathStep>& path, double leaf_value,
                                          double gamma) {
    std::vector<double> returns(path.size());
    double g = leaf_value;
    for (std::size_t i = path.size(); i-- > 0;) {
        g = path[i].reward + (path[i].discounted ? gamma : 1.0) * g;
        returns[i] = g;
    }
    return returns;
}

// Index of the candidate to visit: the first unvisited candidate in canonical
// order, otherwise the UCB arg-max (Max) or arg-min with negated bonus (Min).
// Ties keep the earliest (canonical) index.
inline std::size_t select_index(PlayerRole role, const BonusParams& params, std::size_t level,
                                std::int64_t n_parent, std::span<const double> edge_return_sums,
                                std::span<const std::int64_t> child_visits) {
    if (edge_return_sums.empty()) throw NoActions("empty candidate set at selection");
    for (std::size_t i = 0; i < child_visits.size(); ++i)
        if (child_visits[i] == 0) return i;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < child_visits.size(); ++i) {
        double mean = edge_return_sums[i] / static_cast<double>(child_visits[i]);
        double bonus = ucb_bonus(params, level, n_parent, child_visits[i]);
        double score = role == PlayerRole::Max ? mean + bonus : -(mean - bonus);
        if (i == 0 || score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

struct ActionStat {
    std::string action;
    std::int64_t visits = 0;
    double return_sum = 0.0;
    double mean = 0.0;
};

struct SearchDiagnostics {
    std::int64_t simulations = 0;
    std::int64_t tree_nodes = 0;
    std::int64_t max_depth_plies = 0;
    std::int64_t pruner_calls = 0;
    std::int64_t critic_calls = 0;
};

template <GameRules G>
struct SearchResult {
    double root_value = 0.0;
    typename G::Action best_action{};
    std::string best_action_encoded;
    PlayerRole root_role = PlayerRole::Max;
    std::vector<typename G::Action> root_actions;  // canonical order
    std::vector<ActionStat> actions;               // parallel to root_actions
    SearchDiagnostics diagnostics;

    nlohmann::json to_json() const {
        nlohmann::json stats = nlohmann::json::array();
        for (const auto& s : actions)
            stats.push_back({{"action", s.action},
                             {"visits", s.visits},
                             {"return_sum", s.return_sum},
                             {"mean", s.mean}});
        return {{"root_value", root_value},
                {"best_action", best_action_encoded},
                {"root_role", to_string(root_role)},
                {"actions", stats},
                {"diagnostics",
                 {{"simulations", diagnostics.simulations},
                  {"tree_nodes", diagnostics.tree_nodes},
                  {"max_depth_plies", diagnostics.max_depth_plies},
                  {"pruner_calls", diagnostics.pruner_calls},
                  {"critic_calls", diagnostics.critic_calls}}}};
    }
};

// Empirical-mean arg-max (Max) / arg-min (Min) over visited root actions;
// ties prefer the higher visit count, then canonical order.
template <GameRules G>
typename G::Action best_action(const SearchResult<G>& result, PlayerRole role) {
    if (result.root_actions.empty()) throw NoActions("result has no root actions");
    std::size_t best = result.actions.size();
    for (std::size_t i = 0; i < result.actions.size(); ++i) {
        const auto& s = result.actions[i];
        if (s.visits == 0) continue;
        if (best == result.actions.size()) {
            best = i;
            continue;
        }
        const auto& b = result.actions[best];
        double cur = role == PlayerRole::Max ? s.mean : -s.mean;
        double top = role == PlayerRole::Max ? b.mean : -b.mean;
        if (cur > top || (cur == top && s.visits > b.visits)) best = i;
    }
    if (best == result.actions.size()) throw NoActions("no visited root action");
    return result.root_actions[best];
}

namespace search_detail {

template <GameRules G>
struct TreeNode {
    std::int64_t visits = 0;
    double value_sum = 0.0;
    GameOutcome outcome = GameOutcome::Ongoing;
    bool expanded = false;
    bool critic_cached = false;
    double critic_value = 0.0;
    std::vector<typename G::Action> candidates;  // canonical order
    std::vector<double> edge_return_sum;
    std::vector<std::int64_t> edge_child;  // index into arena, -1 until created
};

}  // namespace search_detail

template <GameRules G>
SearchResult<G> run_search(const G& game, const GameState<G>& root, const SearchConfig& config,
                           Pruner<G>& pruner, Critic<G>& critic, PlayerRole root_role) {
    config.validate();
    if (root.terminal()) throw TerminalState("search rooted at a finished game");
    if (root_role != root.turn())
        throw std::invalid_argument("run_search: root_role does not match the player to move");

    using Node = search_detail::TreeNode<G>;
    std::vector<Node> nodes(1);
    nodes[0].outcome = root.outcome();
    std::mt19937_64 rng(config.rng_seed);
    SearchDiagnostics diag;
    const int max_plies = 2 * config.max_depth;

    auto expand = [&](std::int64_t id, const GameState<G>& state) {
        std::vector<typename G::Action> cands;
        try {
            cands = pruner.prune(state);
        } catch (const std::exception& e) {
            throw PrunerFailure(std::string(e.what()) + " at " + state.board_key());
        }
        ++diag.pruner_calls;
        if (cands.empty()) throw NoActions("pruner returned an empty set at " + state.board_key());
        auto legal = state.legal_actions();
        std::vector<std::string> encoded(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            bool found = false;
            for (const auto& a : legal)
                if (a == cands[i]) {
                    found = true;
                    break;
                }
            if (!found)
                throw PrunerFailure("pruned action " + game.encode_action(cands[i]) +
                                    " is illegal at " + state.board_key());
            encoded[i] = game.encode_action(cands[i]);
        }
        std::vector<std::size_t> order(cands.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return encoded[a] < encoded[b]; });
        Node& nd = nodes[id];
        nd.candidates.reserve(cands.size());
        for (std::size_t i : order) {
            if (!nd.candidates.empty() &&
                game.encode_action(nd.candidates.back()) == encoded[i])
                throw PrunerFailure("duplicate pruned action " + encoded[i] + " at " +
                                    state.board_key());
            nd.candidates.push_back(cands[i]);
        }
        nd.edge_return_sum.assign(nd.candidates.size(), 0.0);
        nd.edge_child.assign(nd.candidates.size(), -1);
        nd.expanded = true;
    };

    struct Visit {
        std::int64_t node;
        std::size_t edge;
    };

    for (std::int64_t sim = 1; sim <= config.num_simulations; ++sim) {
        std::int64_t node_id = 0;
        ++nodes[0].visits;
        GameState<G> state = root;
        std::vector<PathStep> path;
        std::vector<Visit> visits;
        int plies = 0;
        while (plies < max_plies && nodes[node_id].outcome == GameOutcome::Ongoing) {
            if (!nodes[node_id].expanded) expand(node_id, state);
            Node& nd = nodes[node_id];
            std::size_t idx = select_index(state.turn(), config.bonus, static_cast<std::size_t>(plies),
                                           nd.visits, nd.edge_return_sum,
                                           [&] {
                                               std::vector<std::int64_t> cv(nd.edge_child.size());
                                               for (std::size_t i = 0; i < cv.size(); ++i)
                                                   cv[i] = nd.edge_child[i] < 0
                                                               ? 0
                                                               : nodes[nd.edge_child[i]].visits;
                                               return cv;
                                           }());
            const auto action = nd.candidates[idx];
            double reward = sample_reward(game, state.board(), action, rng);
            bool discounted = state.turn() == PlayerRole::Min;
            state = state.apply_unchecked(action);
            std::int64_t child_id = nodes[node_id].edge_child[idx];
            if (child_id < 0) {
                child_id = static_cast<std::int64_t>(nodes.size());
                nodes[node_id].edge_child[idx] = child_id;
                nodes.emplace_back();
                nodes.back().outcome = state.outcome();
            }
            ++nodes[child_id].visits;
            path.push_back({reward, discounted});
            visits.push_back({node_id, idx});
            node_id = child_id;
            ++plies;
        }
        diag.max_depth_plies = std::max<std::int64_t>(diag.max_depth_plies, plies);

        double leaf_value;
        Node& leaf = nodes[node_id];
        if (leaf.outcome != GameOutcome::Ongoing) {
            leaf_value = terminal_value(leaf.outcome) * config.terminal_value_scale;
        } else if (leaf.critic_cached) {
            leaf_value = leaf.critic_value;
        } else {
            try {
                leaf_value = critic.evaluate(state);
            } catch (const std::exception& e) {
                throw CriticFailure(std::string(e.what()) + " at " + state.board_key());
            }
            ++diag.critic_calls;
            leaf.critic_value = leaf_value;
            leaf.critic_cached = true;
        }

        auto returns = backup_returns(path, leaf_value, config.gamma);
        nodes[node_id].value_sum += leaf_value;
        for (std::size_t i = 0; i < visits.size(); ++i) {
            nodes[visits[i].node].edge_return_sum[visits[i].edge] += returns[i];
            nodes[visits[i].node].value_sum += returns[i];
        }
    }

    diag.simulations = config.num_simulations;
    diag.tree_nodes = static_cast<std::int64_t>(nodes.size());

    SearchResult<G> result;
    result.root_role = root_role;
    result.root_value = nodes[0].value_sum / static_cast<double>(config.num_simulations);
    result.diagnostics = diag;
    const Node& rn = nodes[0];
    for (std::size_t i = 0; i < rn.candidates.size(); ++i) {
        std::int64_t child = rn.edge_child[i];
        std::int64_t n = child < 0 ? 0 : nodes[child].visits;
        ActionStat stat;
        stat.action = game.encode_action(rn.candidates[i]);
        stat.visits = n;
        stat.return_sum = rn.edge_return_sum[i];
        stat.mean = n > 0 ? rn.edge_return_sum[i] / static_cast<double>(n) : 0.0;
        result.root_actions.push_back(rn.candidates[i]);
        result.actions.push_back(stat);
    }
    result.best_action = best_action(result, root_role);
    result.best_action_encoded = game.encode_action(result.best_action);
    return result;
}

}  // namespace pmcts
