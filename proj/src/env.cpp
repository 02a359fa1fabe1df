#include "symrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symrl {

bool PerturbationConfig::is_identity() const {
    if (clip_mode == ClipMode::scaled) return false;
    for (double m : action_modifiers)
        if (m != 1.0) return false;
    return true;
}

namespace {

class PerturbedEnv final : public Env {
public:
    PerturbedEnv(std::unique_ptr<Env> inner, PerturbationConfig cfg)
        : inner_(std::move(inner)), cfg_(std::move(cfg)) {
        if (cfg_.action_modifiers.empty())
            cfg_.action_modifiers.assign(inner_->act_dim(), 1.0);
        if (static_cast<int>(cfg_.action_modifiers.size()) != inner_->act_dim())
            throw std::invalid_argument("inject_perturbation: modifier length mismatch");
        for (double m : cfg_.action_modifiers)
            if (m == 0.0) throw std::invalid_argument("inject_perturbation: zero modifier");
    }

    const std::string& name() const override { return inner_->name(); }
    int obs_dim() const override { return inner_->obs_dim(); }
    int act_dim() const override { return inner_->act_dim(); }
    int n_goals() const override { return inner_->n_goals(); }
    int step_limit() const override { return inner_->step_limit(); }
    const std::vector<TransformSpec>& transforms() const override { return inner_->transforms(); }
    EnvState reset(int goal, std::uint64_t seed) const override {
        return inner_->reset(goal, seed);
    }
    EnvState transform_state(int j, const EnvState& s) const override {
        return inner_->transform_state(j, s);
    }
    EnvState random_state(std::mt19937_64& rng) const override {
        return inner_->random_state(rng);
    }

    StepResult step(const EnvState& s, std::span<const double> a) const override {
        Vec mod(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double am = cfg_.action_modifiers[i];
            const double bound = cfg_.clip_mode == PerturbationConfig::ClipMode::scaled
                                     ? std::abs(am)
                                     : 1.0;
            mod[i] = std::clamp(am * a[i], -bound, bound);
        }
        return inner_->step(s, mod);
    }

private:
    std::unique_ptr<Env> inner_;
    PerturbationConfig cfg_;
};

}  // namespace

std::unique_ptr<Env> inject_perturbation(std::unique_ptr<Env> inner, PerturbationConfig cfg) {
    return std::make_unique<PerturbedEnv>(std::move(inner), std::move(cfg));
}

double equivariance_residual(const Env& env, int transform, const EnvState& s,
                             std::span<const double> a) {
    const StepResult direct = env.step(s, a);
    const EnvState direct_then_transform = env.transform_state(transform, direct.state);

    const EnvState ts = env.transform_state(transform, s);
    const Vec ta = apply_declared_action_transform(env.transforms()[transform], a);
    const StepResult transform_then_step = env.step(ts, ta);

    double res = linf_distance(direct_then_transform.obs, transform_then_step.state.obs);
    res += std::abs(direct.reward - transform_then_step.reward);
    if (direct.terminated != transform_then_step.terminated ||
        direct.truncated != transform_then_step.truncated)
        res += 1.0;
    return res;
}

}  // namespace symrl
