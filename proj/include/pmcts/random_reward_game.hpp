#pragma once

// Synthetic fixed-depth game with seeded per-edge rewards. This is the only
// built-in game with nonzero move rewards; it exists to exercise the reward
// and discounting plumbing (pair rewards, backward updates, policy values)
// with known numbers. States are histories over a fixed branching factor,
// terminal at a fixed ply with a drawn outcome. An optional noise width turns
// the per-edge mean into a per-visit uniform sample around it.

#include <optional>
#include <string>
#include <vector>

#include "pmcts/game.hpp"

namespace pmcts {

class RandomRewardGame {
public:
    struct Board {
        std::string path;  // concatenated action digits, doubles as the state id
        bool operator==(const Board&) const = default;
    };
    using Action = int;

    RandomRewardGame(int branching, int depth_plies, std::uint64_t seed, double reward_scale,
                     double noise_width = 0.0)
        : branching_(branching),
          depth_plies_(depth_plies),
          seed_(seed),
          reward_scale_(reward_scale),
          noise_width_(noise_width) {}

    std::string name() const { return "random_reward"; }

    Board initial_board() const { return Board{}; }

    std::vector<Action> legal_actions(const Board& b) const {
        std::vector<Action> actions;
        if (static_cast<int>(b.path.size()) >= depth_plies_) return actions;
        for (int i = 0; i < branching_; ++i) actions.push_back(i);
        return actions;
    }

    Board apply(const Board& b, Action a) const {
        Board next = b;
        next.path += static_cast<char>('0' + a);
        return next;
    }

    GameOutcome outcome(const Board& b) const {
        return static_cast<int>(b.path.size()) >= depth_plies_ ? GameOutcome::Draw
                                                               : GameOutcome::Ongoing;
    }

    // Mean reward of an edge: scale * u with u in [-1, 1] drawn from a hash of
    // (seed, state, action). Deterministic across runs and platforms.
    double expected_reward(const Board& b, Action a) const {
        if (reward_scale_ == 0.0) return 0.0;
        std::uint64_t h = mix_seed(seed_, stable_hash64(b.path + "|" + std::to_string(a)));
        double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
        return reward_scale_ * (2.0 * unit - 1.0);
    }

    double sample_reward(const Board& b, Action a, std::mt19937_64& rng) const {
        double mean = expected_reward(b, a);
        if (noise_width_ == 0.0) return mean;
        return mean + noise_width_ * (2.0 * rand_unit(rng) - 1.0);
    }

    double reward_bound() const { return std::abs(reward_scale_) + noise_width_; }

    std::string encode_action(Action a) const { return std::to_string(a); }

    std::optional<Action> decode_action(const Board&, std::string_view text) const {
        if (text.empty()) return std::nullopt;
        int value = 0;
        for (char c : text) {
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + (c - '0');
        }
        if (value >= branching_) return std::nullopt;
        return value;
    }

    std::string board_key(const Board& b) const { return "p:" + b.path; }
    std::string solver_key(const Board& b) const { return board_key(b); }

    int branching() const { return branching_; }
    int depth_plies() const { return depth_plies_; }

private:
    int branching_;
    int depth_plies_;
    std::uint64_t seed_;
    double reward_scale_;
    double noise_width_;
};

static_assert(GameRules<RandomRewardGame>);

}  // namespace pmcts
