#include "symrl/policy.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace symrl {

GaussianPolicy GaussianPolicy::make(int obs_dim, const std::vector<int>& hidden, int act_dim,
                                    std::uint64_t seed, double log_sigma_init) {
    GaussianPolicy p;
    // Final layer scaled down so initial action means start near zero.
    p.mean_net = Mlp::make(obs_dim, hidden, act_dim, seed, 0.01);
    p.log_sigma.assign(act_dim, log_sigma_init);
    return p;
}

Vec GaussianPolicy::sigma() const {
    Vec s(log_sigma.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(log_sigma[i]);
    return s;
}

ValueFunction ValueFunction::make(int obs_dim, const std::vector<int>& hidden,
                                  std::uint64_t seed) {
    return ValueFunction{Mlp::make(obs_dim, hidden, 1, seed, 1.0)};
}

std::uint64_t PolicySnapshot::hash() const {
    std::uint64_t h = mlp_param_hash(params.mean_net);
    for (double v : params.log_sigma) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

Vec forward_mean(const GaussianPolicy& p, std::span<const double> s) {
    if (static_cast<int>(s.size()) != p.obs_dim())
        throw std::invalid_argument("forward_mean: state dimension mismatch");
    Vec out;
    mlp_forward(p.mean_net, s, out);
    if (!all_finite(out))
        throw std::runtime_error("forward_mean: non-finite output, parameters are poisoned");
    return out;
}

Vec forward_mean(const PolicySnapshot& p, std::span<const double> s) {
    return forward_mean(p.params, s);
}

double value_of(const ValueFunction& v, std::span<const double> s) {
    if (static_cast<int>(s.size()) != v.obs_dim())
        throw std::invalid_argument("value_of: state dimension mismatch");
    Vec out;
    mlp_forward(v.net, s, out);
    if (!std::isfinite(out[0]))
        throw std::runtime_error("value_of: non-finite output, parameters are poisoned");
    return out[0];
}

SampledAction sample_action(const GaussianPolicy& p, std::span<const double> s,
                            std::mt19937_64& rng) {
    Vec mu = forward_mean(p, s);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SampledAction out;
    out.action.resize(mu.size());
    Vec sigma = p.sigma();
    for (std::size_t i = 0; i < mu.size(); ++i) out.action[i] = mu[i] + sigma[i] * gauss(rng);
    out.log_prob = gaussian_log_density(out.action, mu, sigma);
    out.mean = std::move(mu);
    return out;
}

PolicyGrad PolicyGrad::zeros_like(const GaussianPolicy& p) {
    PolicyGrad g;
    g.net = MlpGrad::zeros_like(p.mean_net);
    g.log_sigma.assign(p.log_sigma.size(), 0.0);
    return g;
}

void PolicyGrad::reset() {
    net.reset();
    std::fill(log_sigma.begin(), log_sigma.end(), 0.0);
}

}  // namespace symrl
