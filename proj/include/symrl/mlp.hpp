#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symrl/numerics.hpp"

namespace symrl {

/// Fully-connected net with ReLU hidden layers and a linear output layer.
/// Weights are row-major [out][in]; all parameters are double precision.
struct Mlp {
    struct Layer {
        int in = 0;
        int out = 0;
        Vec w;
        Vec b;
    };

    std::vector<Layer> layers;

    int input_dim() const { return layers.front().in; }
    int output_dim() const { return layers.back().out; }
    std::size_t param_count() const;

    /// Uniform fan-in init U(-1/sqrt(in), 1/sqrt(in)); the final layer is
    /// additionally scaled by final_scale.
    static Mlp make(int in, const std::vector<int>& hidden, int out, std::uint64_t seed,
                    double final_scale = 1.0);
};

/// Forward-pass activations kept around for backprop.
struct MlpCache {
    std::vector<Vec> act;  // act[0] is the input; act[L] the output
};

/// Gradient accumulator with the same layout as the net it mirrors.
struct MlpGrad {
    std::vector<Vec> w;
    std::vector<Vec> b;

    static MlpGrad zeros_like(const Mlp& net);
    void reset();
    std::size_t param_count() const;
};

void mlp_forward(const Mlp& net, std::span<const double> x, Vec& out);
void mlp_forward(const Mlp& net, std::span<const double> x, MlpCache& cache, Vec& out);

/// Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
/// The cache must come from a forward pass of the same net and input.
void mlp_backward(const Mlp& net, const MlpCache& cache, std::span<const double> dout,
                  MlpGrad& grad);

/// Hashable fingerprint of the parameter bytes (snapshot immutability checks).
std::uint64_t mlp_param_hash(const Mlp& net);

/// Adam with global gradient-norm clipping applied before the step.
struct AdamConfig {
    double lr = 3e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double max_grad_norm = 0.5;  // <= 0 disables clipping
};

class AdamOptimizer {
public:
    AdamOptimizer() = default;
    explicit AdamOptimizer(AdamConfig cfg) : cfg_(cfg) {}

    /// One step over a parameter group given matching gradient views.
    /// Throws on NaN gradients without touching the parameters.
    void step(std::span<double* const> params, std::span<const double* const> grads,
              std::span<const std::size_t> sizes);

    const AdamConfig& config() const { return cfg_; }
    AdamConfig& config() { return cfg_; }
    std::int64_t steps_taken() const { return t_; }

    // Serialized by the checkpoint module.
    Vec m_, v_;
    std::int64_t t_ = 0;

private:
    AdamConfig cfg_;
};

/// Convenience view over a policy/value parameter group (net + extras).
struct ParamGroup {
    std::vector<double*> params;
    std::vector<const double*> grads;
    std::vector<std::size_t> sizes;

    void add(Vec& p, const Vec& g);
    std::size_t total() const;
};

}  // namespace symrl
