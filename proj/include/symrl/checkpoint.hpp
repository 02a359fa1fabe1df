#pragma once

#include <random>
#include <string>

#include "symrl/env.hpp"
#include "symrl/fitting.hpp"
#include "symrl/mlp.hpp"
#include "symrl/policy.hpp"

namespace symrl {

/// Everything needed to resume a training run exactly where it stopped.
struct TrainerState {
    GaussianPolicy policy;
    ValueFunction value;
    AdamOptimizer policy_opt;
    AdamOptimizer value_opt;
    bool has_fit = false;
    FitState fit;
    RunningWindow window{1, 1};
    std::mt19937_64 rng_env, rng_policy, rng_shuffle;
    long steps_done = 0;
    int iteration = 0;
    int goal_cursor = 0;
    EnvState env_state;
    bool env_live = false;  // whether env_state continues an episode
};

/// Versioned textual checkpoint: layer shapes followed by row-major values.
void save_checkpoint(const std::string& path, const TrainerState& state);
TrainerState load_checkpoint(const std::string& path, const RelationGraph* graph,
                             const FitConfig* fit_cfg);

/// Net-only helpers shared with the checkpoint writer.
void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);

}  // namespace symrl
