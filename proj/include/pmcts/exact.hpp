#pragma once

// Brute-force ground truth on small games: optimal values under the half-step
// Bellman equations, their pruned-action counterparts, the log-sum-exp
// operator and the pruning-gap diagnostics built on it, critic sup-error, and
// per-level return-magnitude bounds.
//
// Values are always from the Max player's perspective. At a Max-to-move state
//   V(s)  = max_a ( E[R(s,a)] + V_half(s∘a) )
// and at a Min-to-move state
//   V_half(s) = min_b ( E[R(s,b)] + gamma * V(s∘b) ),
// with terminal states valued at their outcome. Per-action tables store the
// max-form action values: at Min states the negated half-step action value,
// so that max over the table recovers -V_half and the same soft-max machinery
// applies at both parities.
//
// Memoization keys are the game-declared Markov keys (solver_key), so the
// tables collapse transpositions exactly when the game's rules allow it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pmcts/game.hpp"
#include "pmcts/search.hpp"

namespace pmcts {

struct StateSpaceExceeded : std::runtime_error {
    explicit StateSpaceExceeded(std::uint64_t cap)
        : std::runtime_error("state space exceeds cap of " + std::to_string(cap)) {}
};

struct SolveOptions {
    std::uint64_t state_cap = 10'000'000;
};

struct ExactStateInfo {
    double value = 0.0;
    bool max_to_move = true;
    bool terminal = false;
    std::vector<std::string> actions;  // encoded, canonical order
    std::vector<double> q;             // max-form action values (see header comment)
};

struct ExactSolution {
    double gamma = 0.0;
    std::string root_key;
    std::unordered_map<std::string, ExactStateInfo> states;

    const ExactStateInfo& at(const std::string& key) const {
        auto it = states.find(key);
        if (it == states.end()) throw std::out_of_range("exact solution misses state " + key);
        return it->second;
    }

    double root_value() const { return at(root_key).value; }

    nlohmann::json to_json() const {
        nlohmann::json table = nlohmann::json::object();
        for (const auto& [key, info] : states)
            table[key] = {{"value", info.value},
                          {"max_to_move", info.max_to_move},
                          {"terminal", info.terminal},
                          {"actions", info.actions},
                          {"q", info.q}};
        return {{"gamma", gamma}, {"root_key", root_key}, {"states", table}};
    }

    static ExactSolution from_json(const nlohmann::json& j) {
        ExactSolution s;
        s.gamma = j.at("gamma").get<double>();
        s.root_key = j.at("root_key").get<std::string>();
        for (const auto& [key, v] : j.at("states").items()) {
            ExactStateInfo info;
            info.value = v.at("value").get<double>();
            info.max_to_move = v.at("max_to_move").get<bool>();
            info.terminal = v.at("terminal").get<bool>();
            info.actions = v.at("actions").get<std::vector<std::string>>();
            info.q = v.at("q").get<std::vector<double>>();
            s.states[key] = std::move(info);
        }
        return s;
    }
};

namespace exact_detail {

template <GameRules G>
double solve_rec(const G& game, const GameState<G>& state, double gamma, Pruner<G>* pruner,
                 const SolveOptions& opts, ExactSolution& out) {
    std::string key = state.solver_key();
    if (auto it = out.states.find(key); it != out.states.end()) return it->second.value;
    if (out.states.size() >= opts.state_cap) throw StateSpaceExceeded(opts.state_cap);

    GameOutcome o = state.outcome();
    if (o != GameOutcome::Ongoing) {
        ExactStateInfo info;
        info.value = terminal_value(o);
        info.max_to_move = state.turn() == PlayerRole::Max;
        info.terminal = true;
        out.states.emplace(key, std::move(info));
        return terminal_value(o);
    }

    std::vector<typename G::Action> actions =
        pruner ? pruner->prune(state) : state.legal_actions();
    if (actions.empty()) throw NoActions("solver reached a non-terminal state without actions");

    ExactStateInfo info;
    info.max_to_move = state.turn() == PlayerRole::Max;
    info.q.reserve(actions.size());
    double best = 0.0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        double reward = game.expected_reward(state.board(), actions[i]);
        double child = solve_rec(game, state.apply_unchecked(actions[i]), gamma, pruner, opts, out);
        double q;
        if (info.max_to_move) {
            q = reward + child;  // max-form already
        } else {
            q = -(reward + gamma * child);  // negate so max over q = -V_half
        }
        info.actions.push_back(game.encode_action(actions[i]));
        info.q.push_back(q);
        double value_candidate = info.max_to_move ? q : -q;
        if (i == 0) best = value_candidate;
        else best = info.max_to_move ? std::max(best, value_candidate)
                                     : std::min(best, value_candidate);
    }
    info.value = best;
    double value = info.value;
    out.states.emplace(key, std::move(info));
    return value;
}

}  // namespace exact_detail

template <GameRules G>
ExactSolution solve_exact(const G& game, const GameState<G>& root, double gamma,
                          const SolveOptions& opts = {}, Pruner<G>* pruner = nullptr) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("solve_exact: gamma in [0,1)");
    ExactSolution out;
    out.gamma = gamma;
    out.root_key = root.solver_key();
    exact_detail::solve_rec(game, root, gamma, pruner, opts, out);
    return out;
}

template <GameRules G>
double exact_value(const G& game, const GameState<G>& state, double gamma,
                   const SolveOptions& opts = {}) {
    return solve_exact(game, state, gamma, opts).root_value();
}

// Optimal value with both players restricted to the pruned action space.
template <GameRules G>
double pruned_exact_value(const G& game, const GameState<G>& state, double gamma,
                          Pruner<G>& pruner, const SolveOptions& opts = {}) {
    return solve_exact(game, state, gamma, opts, &pruner).root_value();
}

// Depth-first enumeration of the reachable state space (full legal actions),
// one visit per solver key.
template <GameRules G>
void for_each_reachable_state(const G& game, const GameState<G>& root, std::uint64_t state_cap,
                              const std::function<void(const GameState<G>&)>& fn) {
    std::unordered_set<std::string> seen;
    std::vector<GameState<G>> stack{root};
    seen.insert(root.solver_key());
    while (!stack.empty()) {
        GameState<G> state = std::move(stack.back());
        stack.pop_back();
        fn(state);
        if (state.terminal()) continue;
        for (const auto& a : game.legal_actions(state.board())) {
            GameState<G> child = state.apply_unchecked(a);
            if (seen.insert(child.solver_key()).second) {
                if (seen.size() > state_cap) throw StateSpaceExceeded(state_cap);
                stack.push_back(std::move(child));
            }
        }
    }
}

// Normalized log-sum-exp: (1/tau) * log( (1/|X|) * sum exp(tau * v) ),
// stabilized around the maximum.
inline double lse(const std::vector<double>& values, double tau) {
    if (values.empty()) throw std::invalid_argument("lse: empty value list");
    if (!(tau > 0)) throw std::invalid_argument("lse: tau must be positive");
    double m = values[0];
    for (double v : values) m = std::max(m, v);
    double sum = 0.0;
    for (double v : values) sum += std::exp(tau * (v - m));
    return m + std::log(sum / static_cast<double>(values.size())) / tau;
}

// Soft-max gap of the pruner per temperature: for each tau the maximum over
// parities and states of |lse(Q(s,.), A, tau) - lse(Q(s,.), pruned, tau)|.
template <GameRules G>
std::vector<double> epsilon1(const G& game, const GameState<G>& root, const ExactSolution& solution,
                             Pruner<G>& pruner, const std::vector<double>& taus,
                             std::uint64_t state_cap = SolveOptions{}.state_cap) {
    std::vector<double> result(taus.size(), 0.0);
    for_each_reachable_state<G>(game, root, state_cap, [&](const GameState<G>& state) {
        if (state.terminal()) return;
        const ExactStateInfo& info = solution.at(state.solver_key());
        auto pruned = pruner.prune(state);
        std::vector<double> pruned_q;
        pruned_q.reserve(pruned.size());
        for (const auto& a : pruned) {
            std::string code = game.encode_action(a);
            bool found = false;
            for (std::size_t i = 0; i < info.actions.size(); ++i)
                if (info.actions[i] == code) {
                    pruned_q.push_back(info.q[i]);
                    found = true;
                    break;
                }
            if (!found)
                throw PrunerFailure("pruned action " + code + " not in solution at " +
                                    state.solver_key());
        }
        if (pruned_q.empty()) throw NoActions("pruner returned empty set at " + state.solver_key());
        for (std::size_t t = 0; t < taus.size(); ++t) {
            double gap = std::abs(lse(info.q, taus[t]) - lse(pruned_q, taus[t]));
            result[t] = std::max(result[t], gap);
        }
    });
    return result;
}

struct PruningBoundEntry {
    double tau = 0.0;
    double eps1 = 0.0;
    double rhs = 0.0;   // (2/(1-gamma)) * (eps1 + 2*log(|A||A~|)/tau)
    double slack = 0.0; // rhs - max_state lhs
    std::int64_t violations = 0;
};

struct PruningBoundReport {
    double gamma = 0.0;
    double lhs_max = 0.0;   // max over pruned-reachable states of |V* - pruned V*|
    double eps_hat = 0.0;   // max over states of |max_A Q - max_pruned Q|
    std::int64_t card_full = 0;    // max |A(s)| over reachable states
    std::int64_t card_pruned = 0;  // max |pruned(s)|
    std::int64_t states_checked = 0;
    std::vector<PruningBoundEntry> entries;

    bool ok() const {
        for (const auto& e : entries)
            if (e.violations > 0) return false;
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : entries)
            rows.push_back({{"tau", e.tau},
                            {"eps1", e.eps1},
                            {"rhs", e.rhs},
                            {"slack", e.slack},
                            {"violations", e.violations}});
        return {{"gamma", gamma},
                {"lhs_max", lhs_max},
                {"eps_hat", eps_hat},
                {"card_full", card_full},
                {"card_pruned", card_pruned},
                {"states_checked", states_checked},
                {"entries", rows},
                {"ok", ok()}};
    }
};

// Verifies |V*(s) - prunedV*(s)| <= (2/(1-gamma)) * (eps1(tau) + 2 log(|A||A~|)/tau)
// on every state reachable under pruning, for every tau in the grid. The
// cardinalities are maxima over reachable states. Violations are counted, not
// thrown.
template <GameRules G>
PruningBoundReport check_pruning_bound(const G& game, const GameState<G>& root, double gamma,
                                       Pruner<G>& pruner, const std::vector<double>& taus,
                                       const SolveOptions& opts = {}) {
    PruningBoundReport report;
    report.gamma = gamma;

    ExactSolution full = solve_exact(game, root, gamma, opts);
    ExactSolution pruned = solve_exact(game, root, gamma, opts, &pruner);

    std::vector<double> eps = epsilon1(game, root, full, pruner, taus, opts.state_cap);

    // eps_hat and cardinalities over the full reachable space.
    for_each_reachable_state<G>(game, root, opts.state_cap, [&](const GameState<G>& state) {
        if (state.terminal()) return;
        const ExactStateInfo& info = full.at(state.solver_key());
        report.card_full = std::max<std::int64_t>(report.card_full,
                                                  static_cast<std::int64_t>(info.actions.size()));
        auto pruned_actions = pruner.prune(state);
        report.card_pruned = std::max<std::int64_t>(
            report.card_pruned, static_cast<std::int64_t>(pruned_actions.size()));
        double max_full = info.q[0];
        for (double q : info.q) max_full = std::max(max_full, q);
        double max_pruned = 0.0;
        bool first = true;
        for (const auto& a : pruned_actions) {
            std::string code = game.encode_action(a);
            for (std::size_t i = 0; i < info.actions.size(); ++i)
                if (info.actions[i] == code) {
                    max_pruned = first ? info.q[i] : std::max(max_pruned, info.q[i]);
                    first = false;
                    break;
                }
        }
        report.eps_hat = std::max(report.eps_hat, std::abs(max_full - max_pruned));
    });

    // LHS on states reachable under pruning (both value tables defined there).
    double lhs_max = 0.0;
    std::int64_t states_checked = 0;
    for (const auto& [key, info] : pruned.states) {
        ++states_checked;
        lhs_max = std::max(lhs_max, std::abs(full.at(key).value - info.value));
    }
    report.lhs_max = lhs_max;
    report.states_checked = states_checked;

    double log_card =
        std::log(static_cast<double>(report.card_full) * static_cast<double>(report.card_pruned));
    for (std::size_t t = 0; t < taus.size(); ++t) {
        PruningBoundEntry entry;
        entry.tau = taus[t];
        entry.eps1 = eps[t];
        entry.rhs = 2.0 / (1.0 - gamma) * (eps[t] + 2.0 * log_card / taus[t]);
        entry.slack = entry.rhs - lhs_max;
        entry.violations = lhs_max > entry.rhs + 1e-12 ? 1 : 0;
        if (entry.violations > 0) {
            // count per-state violations for the report
            entry.violations = 0;
            for (const auto& [key, info] : pruned.states)
                if (std::abs(full.at(key).value - info.value) > entry.rhs + 1e-12)
                    ++entry.violations;
        }
        report.entries.push_back(entry);
    }
    return report;
}

// Empirical sup-norm critic error over the reachable states.
template <GameRules G>
double critic_sup_error(const G& game, const GameState<G>& root, const ExactSolution& solution,
                        Critic<G>& critic, std::uint64_t state_cap = SolveOptions{}.state_cap) {
    double worst = 0.0;
    for_each_reachable_state<G>(game, root, state_cap, [&](const GameState<G>& state) {
        double err = std::abs(critic.evaluate(state) - solution.at(state.solver_key()).value);
        worst = std::max(worst, err);
    });
    return worst;
}

// Per-level bound on the magnitude of the returns accumulated by the search:
// v_max = 2 R / (1 - gamma); the deepest half level is R + gamma*(v_max+eps0)
// and the recursion alternates R + bound (Max levels) and R + gamma*bound
// (half levels) down to the root. Levels are indexed in plies from the root
// (0 = root decision, 2H-1 = deepest half step).
struct MagnitudeBounds {
    double v_max = 0.0;
    std::vector<double> level_bound;

    double bound_at(std::size_t level) const { return level_bound.at(level); }
};

inline MagnitudeBounds magnitude_bounds(double r_max, double gamma, double eps0, int depth) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("magnitude_bounds: gamma in [0,1)");
    if (depth < 1) throw std::invalid_argument("magnitude_bounds: depth >= 1");
    MagnitudeBounds out;
    out.v_max = 2.0 * r_max / (1.0 - gamma);
    out.level_bound.assign(static_cast<std::size_t>(2 * depth), 0.0);
    out.level_bound[2 * depth - 1] = r_max + gamma * (out.v_max + eps0);
    for (int level = 2 * depth - 2; level >= 0; --level) {
        if (level % 2 == 0)  // Max decision level h
            out.level_bound[level] = r_max + out.level_bound[level + 1];
        else  // half level: the discount applies below it
            out.level_bound[level] = r_max + gamma * out.level_bound[level + 1];
    }
    return out;
}

// A pair of (possibly stochastic) policies, one per role. Distributions are
// over legal actions and must sum to 1.
template <GameRules G>
struct PolicyPair {
    using Dist = std::vector<std::pair<typename G::Action, double>>;
    std::function<Dist(const GameState<G>&)> mu;  // Max player
    std::function<Dist(const GameState<G>&)> nu;  // Min player
};

namespace exact_detail {

template <GameRules G>
typename PolicyPair<G>::Dist checked_dist(const PolicyPair<G>& pair, const GameState<G>& state) {
    auto dist = state.turn() == PlayerRole::Max ? pair.mu(state) : pair.nu(state);
    double total = 0.0;
    for (const auto& [a, p] : dist) total += p;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("policy distribution sums to " + std::to_string(total));
    return dist;
}

}  // namespace exact_detail

// Expected discounted reward stream under the policy pair (rewards only, no
// terminal bonus), by full expansion of the distribution tree. The horizon is
// counted in full steps.
template <GameRules G>
double policy_value(const G& game, const GameState<G>& root, double gamma,
                    const PolicyPair<G>& pair, int horizon_full_steps) {
    std::function<double(const GameState<G>&, int)> rec = [&](const GameState<G>& state,
                                                              int plies_left) -> double {
        if (plies_left == 0 || state.terminal()) return 0.0;
        auto dist = exact_detail::checked_dist(pair, state);
        double discount = state.turn() == PlayerRole::Min ? gamma : 1.0;
        double value = 0.0;
        for (const auto& [a, p] : dist) {
            if (p == 0.0) continue;
            double reward = game.expected_reward(state.board(), a);
            value += p * (reward + discount * rec(state.apply_unchecked(a), plies_left - 1));
        }
        return value;
    };
    return rec(root, 2 * horizon_full_steps);
}

struct MonteCarloValue {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

// Seeded Monte-Carlo estimate of the same quantity, for stochastic pairs too
// expensive to enumerate. Reports the standard error of the mean.
template <GameRules G>
MonteCarloValue policy_value_mc(const G& game, const GameState<G>& root, double gamma,
                                const PolicyPair<G>& pair, int horizon_full_steps,
                                std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("policy_value_mc: samples >= 1");
    std::mt19937_64 rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        GameState<G> state = root;
        double total = 0.0, discount = 1.0;
        for (int plies = 0; plies < 2 * horizon_full_steps && !state.terminal(); ++plies) {
            auto dist = exact_detail::checked_dist(pair, state);
            double u = rand_unit(rng), acc = 0.0;
            std::size_t pick = dist.size() - 1;
            for (std::size_t j = 0; j < dist.size(); ++j) {
                acc += dist[j].second;
                if (u < acc) {
                    pick = j;
                    break;
                }
            }
            const auto& a = dist[pick].first;
            total += discount * game.expected_reward(state.board(), a);
            if (state.turn() == PlayerRole::Min) discount *= gamma;
            state = state.apply_unchecked(a);
        }
        sum += total;
        sum_sq += total * total;
    }
    MonteCarloValue out;
    out.samples = samples;
    out.value = sum / static_cast<double>(samples);
    double var = std::max(0.0, sum_sq / static_cast<double>(samples) - out.value * out.value);
    out.std_error = std::sqrt(var / static_cast<double>(samples));
    return out;
}

// Critic backed by a solved table; exact by construction.
template <GameRules G>
class ExactCritic : public Critic<G> {
public:
    explicit ExactCritic(std::shared_ptr<const ExactSolution> solution)
        : solution_(std::move(solution)) {}
    double evaluate(const GameState<G>& state) override {
        return solution_->at(state.solver_key()).value;
    }
    std::string id() const override { return "exact"; }

private:
    std::shared_ptr<const ExactSolution> solution_;
};

}  // namespace pmcts
