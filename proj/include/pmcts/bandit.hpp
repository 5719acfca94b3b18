#pragma once

// Standalone non-stationary multi-armed bandit with the polynomial-bonus UCB
// variant, in Max (argmax of mean + bonus) and Min (argmin of mean - bonus)
// flavors, plus the tau(t) / tau* threshold diagnostics. The selection score
// uses the empirical mean plus bonus; see the project notes on the sum-form
// alternative, which lets heavily pulled arms dominate regardless of quality.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmcts/game.hpp"

namespace pmcts {

struct ScanCapExceeded : std::runtime_error {
    explicit ScanCapExceeded(std::uint64_t cap)
        : std::runtime_error("threshold scan exceeded cap of " + std::to_string(cap)) {}
};

struct BanditArm {
    enum class Kind { Constant, UniformNoise, Drift };

    double limit_mean = 0.0;
    Kind kind = Kind::Constant;
    double param = 0.0;  // noise half-width, or drift coefficient c in c/sqrt(n)

    // Reward of the n-th pull of this arm (n is 1-based).
    double reward(std::int64_t n, std::mt19937_64& rng) const {
        switch (kind) {
            case Kind::Constant: return limit_mean;
            case Kind::UniformNoise: return limit_mean + param * (2.0 * rand_unit(rng) - 1.0);
            case Kind::Drift: return limit_mean + param / std::sqrt(static_cast<double>(n));
        }
        return limit_mean;
    }
};

class BanditEnv {
public:
    BanditEnv(std::vector<BanditArm> arms, double reward_bound)
        : arms_(std::move(arms)), bound_(reward_bound) {
        if (arms_.size() < 1) throw std::invalid_argument("BanditEnv: at least one arm");
        for (const auto& a : arms_)
            if (std::abs(a.limit_mean) + std::abs(a.param) > bound_ + 1e-12)
                throw std::invalid_argument("BanditEnv: arm can exceed the reward bound");
    }

    std::size_t arm_count() const { return arms_.size(); }
    double reward_bound() const { return bound_; }
    const std::vector<BanditArm>& arms() const { return arms_; }

    double limit_mean(std::size_t k) const { return arms_[k].limit_mean; }

    double best_mean(PlayerRole role) const {
        double best = arms_[0].limit_mean;
        for (const auto& a : arms_)
            best = role == PlayerRole::Max ? std::max(best, a.limit_mean)
                                           : std::min(best, a.limit_mean);
        return best;
    }

    std::size_t best_arm(PlayerRole role) const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < arms_.size(); ++k) {
            bool better = role == PlayerRole::Max ? arms_[k].limit_mean > arms_[best].limit_mean
                                                  : arms_[k].limit_mean < arms_[best].limit_mean;
            if (better) best = k;
        }
        return best;
    }

    double sample(std::size_t k, std::int64_t pull_number, std::mt19937_64& rng) const {
        double r = arms_[k].reward(pull_number, rng);
        return std::clamp(r, -bound_, bound_);
    }

private:
    std::vector<BanditArm> arms_;
    double bound_;
};

struct UcbParams {
    double alpha = 2.5;
    double beta = 1.1;
    double xi = 10.0;

    void validate() const {
        if (!(alpha > 0) || !(beta > 0) || !(xi > 0))
            throw std::invalid_argument("UcbParams: alpha, beta, xi must be positive");
    }

    // alpha in (2, inf) intersected with [xi/4, xi/2), beta > 1.
    bool theory_preset() const {
        return alpha > 2.0 && beta > 1.0 && xi > 0 && alpha >= xi / 4.0 && alpha < xi / 2.0;
    }

    double bonus(std::int64_t t, std::int64_t pulls) const {
        return std::pow(beta, 1.0 / xi) * std::pow(static_cast<double>(t), alpha / xi) /
               std::sqrt(static_cast<double>(pulls));
    }
};

struct UcbState {
    UcbParams params;
    std::int64_t t = 0;  // pulls made so far
    std::vector<std::int64_t> pulls;
    std::vector<double> reward_sums;

    explicit UcbState(std::size_t arms, UcbParams p = {})
        : params(p), pulls(arms, 0), reward_sums(arms, 0.0) {}

    void record(std::size_t arm, double reward) {
        ++t;
        ++pulls[arm];
        reward_sums[arm] += reward;
    }
};

// Unpulled arms first (lowest index), then the role's UCB rule; ties keep the
// lowest index.
inline std::size_t ucb_arm_select(const UcbState& state, PlayerRole role) {
    for (std::size_t k = 0; k < state.pulls.size(); ++k)
        if (state.pulls[k] == 0) return k;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t k = 0; k < state.pulls.size(); ++k) {
        double mean = state.reward_sums[k] / static_cast<double>(state.pulls[k]);
        double bonus = state.params.bonus(state.t, state.pulls[k]);
        double score = role == PlayerRole::Max ? mean + bonus : -(mean - bonus);
        if (k == 0 || score > best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;
}

struct BanditStep {
    std::int64_t t = 0;
    std::size_t arm = 0;
    double reward = 0.0;
    double running_mean = 0.0;
};

struct BanditTrace {
    std::vector<BanditStep> steps;
    std::vector<std::int64_t> pull_counts;
    // |running mean - limit optimum| sampled at T/8, T/4, T/2, T.
    std::vector<std::pair<std::int64_t, double>> checkpoints;

    double final_mean() const { return steps.empty() ? 0.0 : steps.back().running_mean; }

    void to_csv(std::ostream& os) const {
        os << "step,arm,reward,running_mean\n";
        for (const auto& s : steps)
            os << s.t << ',' << s.arm << ',' << s.reward << ',' << s.running_mean << '\n';
    }
};

inline BanditTrace simulate_bandit(const BanditEnv& env, std::int64_t total_steps,
                                   const UcbParams& params, PlayerRole role, std::uint64_t seed) {
    params.validate();
    if (total_steps < static_cast<std::int64_t>(env.arm_count()))
        throw std::invalid_argument("simulate_bandit: need at least one step per arm");
    UcbState state(env.arm_count(), params);
    std::mt19937_64 rng(seed);
    BanditTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(total_steps));
    double target = env.best_mean(role);
    double reward_total = 0.0;
    std::vector<std::int64_t> marks{total_steps / 8, total_steps / 4, total_steps / 2, total_steps};
    for (std::int64_t t = 1; t <= total_steps; ++t) {
        std::size_t arm = ucb_arm_select(state, role);
        double reward = env.sample(arm, state.pulls[arm] + 1, rng);
        state.record(arm, reward);
        reward_total += reward;
        double running = reward_total / static_cast<double>(t);
        trace.steps.push_back({t, arm, reward, running});
        for (std::int64_t mark : marks)
            if (t == mark && mark > 0) trace.checkpoints.emplace_back(t, std::abs(running - target));
    }
    trace.pull_counts = state.pulls;
    return trace;
}

// tau(t) = ceil( (2/delta * beta^(1/xi))^2 * t^(2 alpha / xi) ).
inline std::uint64_t tau_of_t(double delta, double beta, double xi, double alpha, std::uint64_t t) {
    if (!(delta > 0)) throw std::invalid_argument("tau_of_t: delta > 0");
    double base = 2.0 / delta * std::pow(beta, 1.0 / xi);
    double value = base * base * std::pow(static_cast<double>(t), 2.0 * alpha / xi);
    return static_cast<std::uint64_t>(std::ceil(value - 1e-12));
}

// Smallest t with t >= tau(t) and 2 R tau(t) >= sqrt(t) + 2 R (4K - 3).
inline std::uint64_t tau_star(double delta, double beta, double xi, double alpha, double reward_bound,
                              std::size_t arms, std::uint64_t scan_cap = 10'000'000) {
    for (std::uint64_t t = 1; t <= scan_cap; ++t) {
        std::uint64_t tau = tau_of_t(delta, beta, xi, alpha, t);
        bool ge = t >= tau;
        bool conc = 2.0 * reward_bound * static_cast<double>(tau) >=
                    std::sqrt(static_cast<double>(t)) +
                        2.0 * reward_bound * (4.0 * static_cast<double>(arms) - 3.0);
        if (ge && conc) return t;
    }
    throw ScanCapExceeded(scan_cap);
}

struct TauThresholds {
    std::uint64_t tau_t = 0;
    std::uint64_t tau_star_value = 0;
};

inline TauThresholds tau_thresholds(double delta, double beta, double xi, double alpha,
                                    std::uint64_t t, double reward_bound, std::size_t arms,
                                    std::uint64_t scan_cap = 10'000'000) {
    return {tau_of_t(delta, beta, xi, alpha, t),
            tau_star(delta, beta, xi, alpha, reward_bound, arms, scan_cap)};
}

}  // namespace pmcts
