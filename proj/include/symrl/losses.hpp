#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symrl/numerics.hpp"
#include "symrl/policy.hpp"
#include "symrl/relation_graph.hpp"
#include "symrl/rollout.hpp"
#include "symrl/transforms.hpp"

namespace symrl {

enum class SymMethod { none, msl, psl, asl };

/// Per-transform configuration of the symmetry extension attached to PPO.
struct SymLossConfig {
    SymMethod method = SymMethod::none;
    Vec w_pi;  // policy symmetry loss weight per transform
    Vec w_v;   // value symmetry loss weight per transform (default 0.5)
    Vec k_s;   // ASL: maximum distribution shift per transform
    Vec k_d;   // ASL: dead zone radius per transform (0 for rotations)
    double k_v = 1.5;  // ASL: value gate factor, > 1
    bool value_gate_enabled = true;
    std::size_t k_t = 40960;  // dead zone window length (10 x batch steps)
    bool fitting_enabled = true;

    static SymLossConfig defaults(SymMethod method, const std::vector<TransformSpec>& specs,
                                  double w_pi_value, std::size_t batch_steps);
};

/// Binary masks per (transform, step) plus the batch rejection ratio.
struct GateOutputs {
    int n_transforms = 0;
    int batch = 0;
    std::vector<std::uint8_t> psi;  // dead zone gate
    std::vector<std::uint8_t> phi;  // value gate
    Vec nsrr;                       // per transform: mean(1 - psi)

    bool open(int j, int t) const {
        const std::size_t k = static_cast<std::size_t>(j) * batch + t;
        return psi[k] != 0 && phi[k] != 0;
    }
    bool psi_at(int j, int t) const { return psi[static_cast<std::size_t>(j) * batch + t] != 0; }
};

/// Dead zone gate: psi = 1 iff the MAD-normalized distance between s_t and
/// f_j(s_t), averaged over state elements, exceeds k_d. MAD elements below
/// 1e-9 are floored and their contribution treated as zero.
void dead_zone_gate(const RolloutBatch& batch, const std::vector<TransformSpec>& specs,
                    const RunningWindow& window, std::span<const double> k_d, GateOutputs& gates);

/// v_t in closed form: alpha*V + (k_v - alpha)*|V| with alpha = (k_v^2+1)/(2 k_v).
double value_gate_threshold(double v_state, double k_v);

/// phi = 1 iff v_t > V(f_j(s_t)) (strict).
void value_gate(const RolloutBatch& batch, const ValueFunction& vf, double k_v,
                GateOutputs& gates);

/// Gates for one batch: dead zone from the state window, value gate from the
/// pre-update critic. A disabled value gate leaves phi all-ones.
GateOutputs compute_gates(const RolloutBatch& batch, const std::vector<TransformSpec>& specs,
                          const RunningWindow& window, const ValueFunction& vf,
                          const SymLossConfig& cfg);

// ---- ASL building blocks (also used directly by tests/plots) ----

/// Per-element soft limit xi = (1+eps)^(1/n) - 1.
double asl_xi(double eps, int n);

/// Delta-mu vector: k_s * sigma_i * sqrt(-2 ln(1/(1+xi))).
Vec asl_delta_mu(double k_s, std::span<const double> sigma, double xi);

/// Full mean-shift curve as a function of the exploration distance k_e.
double delta_mu_full(double k_e, double sigma, double xi);

/// Elementwise clip of the composed estimator output around a'_{j,t}.
Vec asl_target(std::span<const double> ghat_mu_last, std::span<const double> a_bar_prime,
               std::span<const double> delta_mu);

/// Ratio exponent of the ASL policy term; the ratio is exp(clamp(exponent)).
double asl_ratio_exponent(std::span<const double> tau, std::span<const double> a_bar_prime,
                          std::span<const double> mu_theta, std::span<const double> sigma,
                          std::span<const double> w_g);
double asl_ratio(std::span<const double> tau, std::span<const double> a_bar_prime,
                 std::span<const double> mu_theta, std::span<const double> sigma,
                 std::span<const double> w_g);

constexpr double kAslExponentClamp = 30.0;

}  // namespace symrl
