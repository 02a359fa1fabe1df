#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symrl/numerics.hpp"
#include "symrl/transforms.hpp"

namespace symrl {

/// Environment state as a value: the observation vector plus whatever hidden
/// bookkeeping the dynamics need. Step functions are pure.
struct EnvState {
    Vec obs;
    Vec hidden;
    int step = 0;
};

struct StepResult {
    EnvState state;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
};

class Env {
public:
    virtual ~Env() = default;
    virtual const std::string& name() const = 0;
    virtual int obs_dim() const = 0;
    virtual int act_dim() const = 0;
    virtual int n_goals() const = 0;
    virtual int step_limit() const = 0;
    virtual const std::vector<TransformSpec>& transforms() const = 0;
    virtual EnvState reset(int goal, std::uint64_t seed) const = 0;
    virtual StepResult step(const EnvState& s, std::span<const double> a) const = 0;
    /// Counterpart of apply_state_transform that also maps hidden bookkeeping.
    virtual EnvState transform_state(int transform, const EnvState& s) const = 0;
    /// Uniformly random valid state with consistent derived observations.
    virtual EnvState random_state(std::mt19937_64& rng) const = 0;
};

/// Action modifier applied before the inner dynamics: a <- clip(AM .* a, range).
struct PerturbationConfig {
    Vec action_modifiers;  // empty means all ones
    enum class ClipMode { fixed, scaled } clip_mode = ClipMode::fixed;  // [-1,1] or [-AM,AM]

    static PerturbationConfig identity() { return {}; }
    bool is_identity() const;
};

std::unique_ptr<Env> inject_perturbation(std::unique_ptr<Env> inner, PerturbationConfig cfg);

std::unique_ptr<Env> make_triangle_env();
std::unique_ptr<Env> make_crawler_env();

/// Deterministic equivariance check: transform-then-step vs step-then-transform
/// on observations plus the reward difference.
double equivariance_residual(const Env& env, int transform, const EnvState& s,
                             std::span<const double> a);

}  // namespace symrl
