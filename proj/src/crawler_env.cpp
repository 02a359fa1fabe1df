#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "symrl/env.hpp"

namespace symrl {

namespace {

// Planar 8-goal crawler: four legs at 45 + 90k degrees, two joints per leg.
// Even action slots drive hips (rotation about the body z axis), odd slots
// drive knees. Knee wiring: positive action flexes the knees of legs 0 and 3
// and extends those of legs 1 and 2, so mirrored legs across the xz plane are
// in direct proportion and legs across the yz plane are inverted.
constexpr double kKneeSign[4] = {1.0, -1.0, -1.0, 1.0};
constexpr double kLegAngle0 = std::numbers::pi / 4.0;

constexpr double kSpeedLag = 0.5;      // first-order actuator lag
constexpr double kPosGain = 0.3;       // position integration gain
constexpr double kJointLimit = 1.0;
constexpr double kThrust = 0.05;       // body speed per unit of knee drive
constexpr double kHipSwing = 0.5;      // leg axis deflection per hip angle
constexpr double kTurnGain = 0.1;      // heading change per mean hip speed
constexpr double kHeightGain = 0.1;
constexpr double kVzGain = 0.1;
constexpr double kTiltGain = 0.05;
constexpr double kProgressGain = 5.0;
constexpr double kSidePenalty = 2.0;
constexpr double kActionCost = 0.01;
constexpr double kAliveBonus = 0.05;
constexpr double kMaxHeading = 25.0 * std::numbers::pi / 180.0;
constexpr int kStepLimit = 200;
constexpr int kNoProgressWindow = 30;

// Observation layout (24 slots, feet contacts omitted):
//   0        height - initial height
//   1,2      unit goal vector (y, x) in the body frame
//   3,4,5    body velocity (x, y, z)
//   6,7      tilt vector (y, x)
//   8..23    joint position/speed pairs: hip0, knee0, hip1, knee1, ...
constexpr int kObsDim = 24;
constexpr int kActDim = 8;

// hidden = [h0, heading_dev, cum_progress, best_progress, steps_since_best]
constexpr int kHid0 = 0, kHidHeading = 1, kHidCum = 2, kHidBest = 3, kHidSince = 4;

inline int hip_pos_slot(int leg) { return 8 + 4 * leg; }
inline int hip_spd_slot(int leg) { return 9 + 4 * leg; }
inline int knee_pos_slot(int leg) { return 10 + 4 * leg; }
inline int knee_spd_slot(int leg) { return 11 + 4 * leg; }

struct Joints {
    double hip_pos[4], hip_spd[4], knee_pos[4], knee_spd[4];
};

Joints read_joints(const Vec& obs) {
    Joints j;
    for (int k = 0; k < 4; ++k) {
        j.hip_pos[k] = obs[hip_pos_slot(k)];
        j.hip_spd[k] = obs[hip_spd_slot(k)];
        j.knee_pos[k] = obs[knee_pos_slot(k)];
        j.knee_spd[k] = obs[knee_spd_slot(k)];
    }
    return j;
}

double body_height(const Joints& j) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += std::tanh(kKneeSign[k] * j.knee_pos[k]);
    return kHeightGain * acc / 4.0;
}

void derived_obs(const Joints& j, double goal_y, double goal_x, double h0, Vec& obs) {
    obs[1] = goal_y;
    obs[2] = goal_x;
    double vx = 0.0, vy = 0.0, tx = 0.0, ty = 0.0, vz = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double axis = kLegAngle0 + 0.5 * std::numbers::pi * k + kHipSwing * j.hip_pos[k];
        const double ax = std::cos(axis), ay = std::sin(axis);
        const double drive = std::tanh(2.0 * kKneeSign[k] * j.knee_spd[k]);
        vx += kThrust * drive * ax;
        vy += kThrust * drive * ay;
        const double flex = kKneeSign[k] * j.knee_pos[k];
        tx += kTiltGain * flex * ax;
        ty += kTiltGain * flex * ay;
        vz += kVzGain * kKneeSign[k] * j.knee_spd[k] / 4.0;
    }
    obs[0] = body_height(j) - h0;
    obs[3] = vx;
    obs[4] = vy;
    obs[5] = vz;
    obs[6] = ty;
    obs[7] = tx;
    for (int k = 0; k < 4; ++k) {
        obs[hip_pos_slot(k)] = j.hip_pos[k];
        obs[hip_spd_slot(k)] = j.hip_spd[k];
        obs[knee_pos_slot(k)] = j.knee_pos[k];
        obs[knee_spd_slot(k)] = j.knee_spd[k];
    }
}

class CrawlerEnv final : public Env {
public:
    CrawlerEnv() : name_("crawler"), transforms_(crawler_transforms()) {}

    const std::string& name() const override { return name_; }
    int obs_dim() const override { return kObsDim; }
    int act_dim() const override { return kActDim; }
    int n_goals() const override { return 8; }
    int step_limit() const override { return kStepLimit; }
    const std::vector<TransformSpec>& transforms() const override { return transforms_; }

    EnvState reset(int goal, std::uint64_t seed) const override {
        if (goal < 0 || goal >= 8) throw std::domain_error("crawler: goal index must be in 0..7");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.2, 0.2);
        Joints j;
        for (int k = 0; k < 4; ++k) {
            j.hip_pos[k] = u(rng);
            j.knee_pos[k] = u(rng);
            j.hip_spd[k] = 0.0;
            j.knee_spd[k] = 0.0;
        }
        const double rho = goal * std::numbers::pi / 4.0;
        EnvState s;
        s.obs.assign(kObsDim, 0.0);
        s.hidden.assign(5, 0.0);
        s.hidden[kHid0] = body_height(j);
        derived_obs(j, std::sin(rho), std::cos(rho), s.hidden[kHid0], s.obs);
        return s;
    }

    StepResult step(const EnvState& s, std::span<const double> a) const override {
        if (static_cast<int>(a.size()) != kActDim)
            throw std::invalid_argument("crawler: action length must be 8");
        Joints j = read_joints(s.obs);
        double action_cost = 0.0;
        for (int k = 0; k < 4; ++k) {
            j.hip_spd[k] = (1.0 - kSpeedLag) * j.hip_spd[k] + kSpeedLag * a[2 * k];
            j.knee_spd[k] = (1.0 - kSpeedLag) * j.knee_spd[k] + kSpeedLag * a[2 * k + 1];
            j.hip_pos[k] =
                std::clamp(j.hip_pos[k] + kPosGain * j.hip_spd[k], -kJointLimit, kJointLimit);
            j.knee_pos[k] =
                std::clamp(j.knee_pos[k] + kPosGain * j.knee_spd[k], -kJointLimit, kJointLimit);
            action_cost += a[2 * k] * a[2 * k] + a[2 * k + 1] * a[2 * k + 1];
        }

        // Heading change from hip motion rotates the relative goal vector.
        double dchi = 0.0;
        for (int k = 0; k < 4; ++k) dchi += j.hip_spd[k];
        dchi *= kTurnGain / 4.0;
        const double gy = s.obs[1], gx = s.obs[2];
        const double c = std::cos(dchi), sn = std::sin(dchi);
        // Rotate the goal by -dchi in the body frame.
        const double ngx = c * gx + sn * gy;
        const double ngy = -sn * gx + c * gy;

        StepResult r;
        r.state.obs.assign(kObsDim, 0.0);
        r.state.hidden = s.hidden;
        r.state.step = s.step + 1;
        derived_obs(j, ngy, ngx, s.hidden[kHid0], r.state.obs);

        const double vx = r.state.obs[3], vy = r.state.obs[4];
        const double progress = vx * ngx + vy * ngy;
        const double sideways = std::abs(vx * ngy - vy * ngx);
        r.reward = kProgressGain * progress - kSidePenalty * sideways -
                   kActionCost * action_cost + kAliveBonus;

        double& heading = r.state.hidden[kHidHeading];
        heading += dchi;
        double& cum = r.state.hidden[kHidCum];
        cum += progress;
        if (cum > r.state.hidden[kHidBest]) {
            r.state.hidden[kHidBest] = cum;
            r.state.hidden[kHidSince] = 0.0;
        } else {
            r.state.hidden[kHidSince] += 1.0;
        }

        if (std::abs(heading) > kMaxHeading)
            r.terminated = true;
        else if (r.state.step >= kStepLimit || r.state.hidden[kHidSince] >= kNoProgressWindow)
            r.truncated = true;
        return r;
    }

    EnvState transform_state(int j, const EnvState& s) const override {
        EnvState out = s;
        apply_state_transform(transforms_[j], s.obs, out.obs);
        if (transforms_[j].kind == TransformSpec::Kind::reflection)
            out.hidden[kHidHeading] = -s.hidden[kHidHeading];
        return out;
    }

    EnvState random_state(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> upos(-kJointLimit, kJointLimit);
        std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> uhead(-0.3, 0.3);
        std::uniform_real_distribution<double> ucum(-1.0, 4.0);
        std::uniform_real_distribution<double> uext(0.0, 0.5);
        std::uniform_int_distribution<int> ustep(0, kStepLimit - 2);
        std::uniform_int_distribution<int> usince(0, kNoProgressWindow - 2);
        Joints j;
        for (int k = 0; k < 4; ++k) {
            j.hip_pos[k] = upos(rng);
            j.knee_pos[k] = upos(rng);
            j.hip_spd[k] = upos(rng);
            j.knee_spd[k] = upos(rng);
        }
        EnvState s;
        s.obs.assign(kObsDim, 0.0);
        s.hidden.assign(5, 0.0);
        s.hidden[kHidHeading] = uhead(rng);
        s.hidden[kHidCum] = ucum(rng);
        s.hidden[kHidBest] = s.hidden[kHidCum] + uext(rng);
        s.hidden[kHidSince] = usince(rng);
        s.step = ustep(rng);
        const double rho = uang(rng);
        derived_obs(j, std::sin(rho), std::cos(rho), 0.0, s.obs);
        return s;
    }

private:
    std::string name_;
    std::vector<TransformSpec> transforms_;
};

}  // namespace

std::unique_ptr<Env> make_crawler_env() { return std::make_unique<CrawlerEnv>(); }

}  // namespace symrl
