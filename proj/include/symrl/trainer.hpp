#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "symrl/checkpoint.hpp"
#include "symrl/config.hpp"
#include "symrl/metrics.hpp"
#include "symrl/scenario.hpp"

namespace symrl {

struct TrainOptions {
    ExperimentConfig config;
    Scenario scenario;
    std::uint64_t seed = 0;
    std::string out_dir;  // empty disables file output
    std::optional<std::string> resume_from;
    bool verbose = false;
};

struct TrainResult {
    std::vector<MetricsRecord> records;
    double final_eval_return = 0.0;
    std::string metrics_path;
    std::string checkpoint_path;
};

/// The training loop: collect a batch, derive symmetric quantities, update the
/// dead-zone window, compute gates, optionally run one fitting round, then the
/// PPO(+symmetry) update. Policy evaluation every 15 iterations, symmetry
/// metrics every 5.
TrainResult run_training(const TrainOptions& options);

/// Deterministic evaluation: `episodes` runs cycling the goal list with sigma=0
/// actions; returns the mean undiscounted return.
double evaluate_policy(const Env& env, const GaussianPolicy& policy,
                       const std::vector<int>& goals, int episodes, std::uint64_t seed);

/// Schedule helpers (iterations between logs are fixed by the design).
constexpr int kEvalEvery = 15;
constexpr int kSymMetricsEvery = 5;
constexpr int kEvalEpisodes = 16;
int iterations_for(long total_steps, int batch_steps);
int eval_points_for(int iterations);

}  // namespace symrl
