#include "symrl/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace symrl {

SymLossConfig SymLossConfig::defaults(SymMethod method, const std::vector<TransformSpec>& specs,
                                      double w_pi_value, std::size_t batch_steps) {
    SymLossConfig cfg;
    cfg.method = method;
    const std::size_t n = specs.size();
    cfg.w_pi.assign(n, w_pi_value);
    cfg.w_v.assign(n, 0.5);
    cfg.k_s.assign(n, 0.3);
    cfg.k_d.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        if (specs[j].kind == TransformSpec::Kind::reflection) cfg.k_d[j] = 0.1;
    cfg.k_t = 10 * batch_steps;
    return cfg;
}

void dead_zone_gate(const RolloutBatch& batch, const std::vector<TransformSpec>& specs,
                    const RunningWindow& window, std::span<const double> k_d, GateOutputs& gates) {
    const int n = static_cast<int>(specs.size());
    if (static_cast<int>(k_d.size()) != n)
        throw std::invalid_argument("dead_zone_gate: k_d length mismatch");
    if (window.empty()) throw std::invalid_argument("dead_zone_gate: empty state window");
    gates.n_transforms = n;
    gates.batch = batch.size;
    gates.psi.assign(static_cast<std::size_t>(n) * batch.size, 1);
    gates.nsrr.assign(n, 0.0);
    Vec mad = window.mad();
    const int obs = batch.obs_dim;
    for (int j = 0; j < n; ++j) {
        int rejected = 0;
        for (int t = 0; t < batch.size; ++t) {
            auto s = batch.state(t);
            auto fs = batch.sym_state(j, t);
            double acc = 0.0;
            for (int i = 0; i < obs; ++i) {
                if (mad[i] < 1e-9) continue;  // degenerate constant observation
                acc += std::abs(s[i] - fs[i]) / mad[i];
            }
            const bool keep = acc / static_cast<double>(obs) > k_d[j];
            gates.psi[static_cast<std::size_t>(j) * batch.size + t] = keep ? 1 : 0;
            if (!keep) ++rejected;
        }
        gates.nsrr[j] = static_cast<double>(rejected) / static_cast<double>(batch.size);
    }
}

double value_gate_threshold(double v_state, double k_v) {
    const double alpha = (k_v * k_v + 1.0) / (2.0 * k_v);
    return alpha * v_state + (k_v - alpha) * std::abs(v_state);
}

void value_gate(const RolloutBatch& batch, const ValueFunction& vf, double k_v,
                GateOutputs& gates) {
    if (!(k_v > 1.0)) throw std::domain_error("value_gate: k_v must exceed 1");
    const int n = batch.n_transforms;
    gates.phi.assign(static_cast<std::size_t>(n) * batch.size, 1);
    for (int t = 0; t < batch.size; ++t) {
        const double vt = value_gate_threshold(value_of(vf, batch.state(t)), k_v);
        for (int j = 0; j < n; ++j) {
            const double vsym = value_of(vf, batch.sym_state(j, t));
            gates.phi[static_cast<std::size_t>(j) * batch.size + t] = vt > vsym ? 1 : 0;
        }
    }
}

GateOutputs compute_gates(const RolloutBatch& batch, const std::vector<TransformSpec>& specs,
                          const RunningWindow& window, const ValueFunction& vf,
                          const SymLossConfig& cfg) {
    GateOutputs gates;
    dead_zone_gate(batch, specs, window, cfg.k_d, gates);
    if (cfg.value_gate_enabled)
        value_gate(batch, vf, cfg.k_v, gates);
    else
        gates.phi.assign(gates.psi.size(), 1);
    return gates;
}

double asl_xi(double eps, int n) {
    if (n <= 0) throw std::invalid_argument("asl_xi: action size must be positive");
    return std::pow(1.0 + eps, 1.0 / static_cast<double>(n)) - 1.0;
}

Vec asl_delta_mu(double k_s, std::span<const double> sigma, double xi) {
    const double root = std::sqrt(-2.0 * std::log(1.0 / (1.0 + xi)));
    Vec out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = k_s * sigma[i] * root;
    return out;
}

double delta_mu_full(double k_e, double sigma, double xi) {
    const double arm = std::min((1.0 + xi) * std::exp(-0.5 * k_e * k_e), 1.0);
    return sigma * (k_e - std::sqrt(-2.0 * std::log(arm)));
}

Vec asl_target(std::span<const double> ghat_mu_last, std::span<const double> a_bar_prime,
               std::span<const double> delta_mu) {
    Vec tau(ghat_mu_last.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double lo = a_bar_prime[i] - delta_mu[i];
        const double hi = a_bar_prime[i] + delta_mu[i];
        tau[i] = std::min(std::max(ghat_mu_last[i], lo), hi);
    }
    return tau;
}

double asl_ratio_exponent(std::span<const double> tau, std::span<const double> a_bar_prime,
                          std::span<const double> mu_theta, std::span<const double> sigma,
                          std::span<const double> w_g) {
    double e = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double da = tau[i] - a_bar_prime[i];
        const double dm = tau[i] - mu_theta[i];
        e += (da * da - dm * dm) * w_g[i] / (2.0 * sigma[i] * sigma[i]);
    }
    return e;
}

double asl_ratio(std::span<const double> tau, std::span<const double> a_bar_prime,
                 std::span<const double> mu_theta, std::span<const double> sigma,
                 std::span<const double> w_g) {
    double e = asl_ratio_exponent(tau, a_bar_prime, mu_theta, sigma, w_g);
    e = std::min(std::max(e, -kAslExponentClamp), kAslExponentClamp);
    return std::exp(e);
}

}  // namespace symrl
