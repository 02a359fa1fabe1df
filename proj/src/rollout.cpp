#include "symrl/rollout.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace symrl {

void RolloutBatch::allocate(int steps, int obs, int act, int transforms) {
    size = steps;
    obs_dim = obs;
    act_dim = act;
    n_transforms = transforms;
    states.assign(static_cast<std::size_t>(steps) * obs, 0.0);
    actions.assign(static_cast<std::size_t>(steps) * act, 0.0);
    mean_actions.assign(static_cast<std::size_t>(steps) * act, 0.0);
    logp_old.assign(steps, 0.0);
    rewards.assign(steps, 0.0);
    values.assign(steps, 0.0);
    terminated.assign(steps, 0);
    truncated.assign(steps, 0);
    bootstrap_values.assign(steps, 0.0);
    sym_states.assign(static_cast<std::size_t>(transforms) * steps * obs, 0.0);
    sym_means.assign(static_cast<std::size_t>(transforms) * steps * act, 0.0);
    advantages.assign(steps, 0.0);
    value_targets.assign(steps, 0.0);
}

void compute_gae(std::span<const double> rewards, std::span<const double> values,
                 std::span<const std::uint8_t> terminated, std::span<const std::uint8_t> truncated,
                 std::span<const double> bootstrap_values, double gamma, double lambda,
                 Vec& advantages, Vec& value_targets) {
    const std::size_t n = rewards.size();
    if (values.size() != n || terminated.size() != n || truncated.size() != n ||
        bootstrap_values.size() != n)
        throw std::invalid_argument("compute_gae: array lengths differ");
    advantages.assign(n, 0.0);
    value_targets.assign(n, 0.0);
    double gae = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        double next_value;
        bool segment_end;
        if (terminated[t]) {
            next_value = 0.0;
            segment_end = true;
        } else if (truncated[t] || t + 1 == n) {
            next_value = bootstrap_values[t];
            segment_end = true;
        } else {
            next_value = values[t + 1];
            segment_end = false;
        }
        const double delta = rewards[t] + gamma * next_value - values[t];
        gae = segment_end ? delta : delta + gamma * lambda * gae;
        advantages[t] = gae;
        value_targets[t] = gae + values[t];
    }
}

void compute_gae(RolloutBatch& batch, double gamma, double lambda) {
    compute_gae(batch.rewards, batch.values, batch.terminated, batch.truncated,
                batch.bootstrap_values, gamma, lambda, batch.advantages, batch.value_targets);
}

void normalize_advantages(RolloutBatch& batch) {
    const std::size_t n = batch.advantages.size();
    if (n < 2) throw std::invalid_argument("normalize_advantages: need at least 2 samples");
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
        std::fprintf(stderr, "normalize_advantages: zero-variance batch, advantages set to 0\n");
        std::fill(batch.advantages.begin(), batch.advantages.end(), 0.0);
        return;
    }
    for (double& a : batch.advantages) a = (a - mean) / sd;
}

}  // namespace symrl
