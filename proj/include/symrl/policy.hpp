#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "symrl/mlp.hpp"
#include "symrl/numerics.hpp"

namespace symrl {

/// Diagonal-Gaussian policy: an MLP action mean plus a free, state-independent
/// log standard deviation vector.
struct GaussianPolicy {
    Mlp mean_net;
    Vec log_sigma;

    int obs_dim() const { return mean_net.input_dim(); }
    int act_dim() const { return mean_net.output_dim(); }

    static GaussianPolicy make(int obs_dim, const std::vector<int>& hidden, int act_dim,
                               std::uint64_t seed, double log_sigma_init = -1.0);

    Vec sigma() const;
};

struct ValueFunction {
    Mlp net;

    int obs_dim() const { return net.input_dim(); }

    static ValueFunction make(int obs_dim, const std::vector<int>& hidden, std::uint64_t seed);
};

/// Immutable copy of policy parameters (theta_old / theta_last).
struct PolicySnapshot {
    GaussianPolicy params;

    static PolicySnapshot of(const GaussianPolicy& p) { return PolicySnapshot{p}; }
    std::uint64_t hash() const;
};

/// Deterministic action mean mu(s). Throws on dimension mismatch and on
/// non-finite network output (poisoned parameters).
Vec forward_mean(const GaussianPolicy& p, std::span<const double> s);
Vec forward_mean(const PolicySnapshot& p, std::span<const double> s);

double value_of(const ValueFunction& v, std::span<const double> s);

struct SampledAction {
    Vec action;
    Vec mean;
    double log_prob;
};

/// a = mu(s) + sigma .* z with z ~ N(0, I) drawn from rng.
SampledAction sample_action(const GaussianPolicy& p, std::span<const double> s,
                            std::mt19937_64& rng);

/// Gradient holder for one policy (mean net + log_sigma).
struct PolicyGrad {
    MlpGrad net;
    Vec log_sigma;

    static PolicyGrad zeros_like(const GaussianPolicy& p);
    void reset();
};

}  // namespace symrl
