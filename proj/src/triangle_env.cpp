#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symrl/env.hpp"

namespace symrl {

namespace {

// State [X0, X1, X2, Z]: limb angles plus a battery level untouched by
// symmetry. Kinematics: X += kappa * a, Z decays linearly.
constexpr double kKappa = 0.1;
constexpr double kZDecay = 0.01;
constexpr double kLimbRange = 2.0;
constexpr int kStepLimit = 100;

class TriangleEnv final : public Env {
public:
    TriangleEnv() : name_("triangle"), transforms_(triangle_transforms()) {}

    const std::string& name() const override { return name_; }
    int obs_dim() const override { return 4; }
    int act_dim() const override { return 3; }
    int n_goals() const override { return 1; }
    int step_limit() const override { return kStepLimit; }
    const std::vector<TransformSpec>& transforms() const override { return transforms_; }

    EnvState reset(int goal, std::uint64_t seed) const override {
        if (goal != 0) throw std::domain_error("triangle: only goal 0 exists");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        EnvState s;
        s.obs = {u(rng), u(rng), u(rng), 1.0};
        return s;
    }

    StepResult step(const EnvState& s, std::span<const double> a) const override {
        if (a.size() != 3) throw std::invalid_argument("triangle: action length must be 3");
        StepResult r;
        r.state = s;
        double cost = 0.0;
        for (int i = 0; i < 3; ++i) {
            double x = s.obs[i] + kKappa * a[i];
            x = std::clamp(x, -kLimbRange, kLimbRange);
            r.state.obs[i] = x;
            cost += x * x;
        }
        r.state.obs[3] = std::max(s.obs[3] - kZDecay, 0.0);
        r.state.step = s.step + 1;
        r.reward = -cost;
        r.truncated = r.state.step >= kStepLimit;
        return r;
    }

    EnvState transform_state(int j, const EnvState& s) const override {
        EnvState out = s;
        apply_state_transform(transforms_[j], s.obs, out.obs);
        return out;
    }

    EnvState random_state(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> limb(-kLimbRange, kLimbRange);
        std::uniform_real_distribution<double> z(0.0, 1.0);
        std::uniform_int_distribution<int> st(0, kStepLimit - 2);
        EnvState s;
        s.obs = {limb(rng), limb(rng), limb(rng), z(rng)};
        s.step = st(rng);
        return s;
    }

private:
    std::string name_;
    std::vector<TransformSpec> transforms_;
};

}  // namespace

std::unique_ptr<Env> make_triangle_env() { return std::make_unique<TriangleEnv>(); }

}  // namespace symrl
