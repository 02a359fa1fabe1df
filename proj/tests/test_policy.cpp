#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "symrl/policy.hpp"

using namespace symrl;

namespace {

std::vector<double*> param_ptrs(Mlp& net) {
    std::vector<double*> out;
    for (auto& l : net.layers) {
        for (auto& w : l.w) out.push_back(&w);
        for (auto& b : l.b) out.push_back(&b);
    }
    return out;
}

std::vector<double> grad_flat(const MlpGrad& g) {
    std::vector<double> out;
    for (std::size_t l = 0; l < g.w.size(); ++l) {
        out.insert(out.end(), g.w[l].begin(), g.w[l].end());
        out.insert(out.end(), g.b[l].begin(), g.b[l].end());
    }
    return out;
}

}  // namespace

TEST_CASE("forward_mean with a zero final layer returns zero actions") {
    GaussianPolicy p = GaussianPolicy::make(3, {4}, 2, 99);
    auto& last = p.mean_net.layers.back();
    std::fill(last.w.begin(), last.w.end(), 0.0);
    std::fill(last.b.begin(), last.b.end(), 0.0);
    const Vec s = {0.4, -1.0, 2.0};
    const Vec a = forward_mean(p, s);
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 0.0);
}

TEST_CASE("forward_mean is deterministic and shape checked") {
    GaussianPolicy p = GaussianPolicy::make(3, {8, 8}, 2, 1);
    const Vec s = {0.1, 0.2, -0.3};
    const Vec a1 = forward_mean(p, s);
    const Vec a2 = forward_mean(p, s);
    CHECK(a1 == a2);  // bit identical
    CHECK_THROWS_AS(forward_mean(p, Vec{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("forward_mean flags poisoned parameters") {
    GaussianPolicy p = GaussianPolicy::make(2, {4}, 1, 5);
    p.mean_net.layers.back().b[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward_mean(p, Vec{1.0, 1.0}), std::runtime_error);
}

TEST_CASE("analytical Jacobian matches central differences on a 2-4-2 net") {
    Mlp net = Mlp::make(2, {4}, 2, 1234);
    const Vec x = {0.37, -0.81};
    const double h = 1e-5;
    auto ptrs = param_ptrs(net);
    for (int out_idx = 0; out_idx < 2; ++out_idx) {
        MlpGrad grad = MlpGrad::zeros_like(net);
        MlpCache cache;
        Vec y;
        mlp_forward(net, x, cache, y);
        Vec dout(2, 0.0);
        dout[out_idx] = 1.0;
        mlp_backward(net, cache, dout, grad);
        const auto flat = grad_flat(grad);
        REQUIRE(flat.size() == ptrs.size());
        for (std::size_t k = 0; k < ptrs.size(); ++k) {
            const double save = *ptrs[k];
            *ptrs[k] = save + h;
            Vec yp;
            mlp_forward(net, x, yp);
            *ptrs[k] = save - h;
            Vec ym;
            mlp_forward(net, x, ym);
            *ptrs[k] = save;
            const double fd = (yp[out_idx] - ym[out_idx]) / (2.0 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(flat[k])});
            CHECK(std::abs(fd - flat[k]) / scale < 1e-5);
        }
    }
}

TEST_CASE("sample_action collapses to the mean as sigma vanishes") {
    GaussianPolicy p = GaussianPolicy::make(3, {6}, 2, 7, /*log_sigma_init=*/-20.0);
    std::mt19937_64 rng(1);
    const Vec s = {0.5, 0.1, -0.2};
    const Vec mu = forward_mean(p, s);
    const SampledAction sa = sample_action(p, s, rng);
    CHECK(std::abs(sa.action[0] - mu[0]) < 1e-8);
    CHECK(std::abs(sa.action[1] - mu[1]) < 1e-8);
}

TEST_CASE("sample_action is reproducible under a fixed seed") {
    GaussianPolicy p = GaussianPolicy::make(2, {4}, 2, 3);
    const Vec s = {0.2, 0.9};
    std::mt19937_64 rng1(77), rng2(77);
    const SampledAction a = sample_action(p, s, rng1);
    const SampledAction b = sample_action(p, s, rng2);
    CHECK(a.action == b.action);
    CHECK(a.log_prob == b.log_prob);
}

TEST_CASE("sample_action mean obeys a CLT bound") {
    GaussianPolicy p = GaussianPolicy::make(1, {}, 1, 21);
    p.mean_net.layers[0].w[0] = 0.0;
    p.mean_net.layers[0].b[0] = 0.7;
    p.log_sigma[0] = std::log(0.5);
    std::mt19937_64 rng(4242);
    const Vec s = {1.0};
    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += sample_action(p, s, rng).action[0];
    const double mean = acc / n;
    CHECK(std::abs(mean - 0.7) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampled log_prob agrees with gaussian_log_density") {
    GaussianPolicy p = GaussianPolicy::make(2, {5}, 3, 8);
    std::mt19937_64 rng(9);
    const Vec s = {0.3, -0.4};
    const SampledAction sa = sample_action(p, s, rng);
    const Vec mu = forward_mean(p, s);
    CHECK(sa.log_prob ==
          doctest::Approx(gaussian_log_density(sa.action, mu, p.sigma())).epsilon(1e-12));
}

TEST_CASE("snapshot parameters are immune to live-policy updates") {
    GaussianPolicy p = GaussianPolicy::make(3, {8}, 2, 31);
    const PolicySnapshot snap = PolicySnapshot::of(p);
    const std::uint64_t before = snap.hash();

    AdamOptimizer opt(AdamConfig{.lr = 1e-2});
    PolicyGrad g = PolicyGrad::zeros_like(p);
    for (auto& v : g.net.w)
        for (auto& x : v) x = 0.3;
    ParamGroup pg;
    for (std::size_t l = 0; l < p.mean_net.layers.size(); ++l) {
        pg.add(p.mean_net.layers[l].w, g.net.w[l]);
        pg.add(p.mean_net.layers[l].b, g.net.b[l]);
    }
    pg.add(p.log_sigma, g.log_sigma);
    for (int i = 0; i < 5; ++i) opt.step(pg.params, pg.grads, pg.sizes);

    CHECK(snap.hash() == before);
    CHECK(mlp_param_hash(p.mean_net) != mlp_param_hash(snap.params.mean_net));
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
    GaussianPolicy p = GaussianPolicy::make(2, {4}, 1, 17);
    const Vec w_before = p.mean_net.layers[0].w;
    AdamOptimizer opt(AdamConfig{.lr = 1e-3});
    PolicyGrad g = PolicyGrad::zeros_like(p);
    ParamGroup pg;
    pg.add(p.mean_net.layers[0].w, g.net.w[0]);
    opt.step(pg.params, pg.grads, pg.sizes);
    CHECK(p.mean_net.layers[0].w == w_before);
}

TEST_CASE("adam first step with a constant gradient is a signed lr-sized move") {
    Vec params = {1.0, -2.0};
    Vec grads = {0.3, -0.1};
    AdamConfig cfg;
    cfg.lr = 1e-2;
    cfg.max_grad_norm = 0.0;  // no clipping
    AdamOptimizer opt(cfg);
    double* pp = params.data();
    const double* gp = grads.data();
    const std::size_t sz = 2;
    opt.step(std::span<double* const>(&pp, 1), std::span<const double* const>(&gp, 1),
             std::span<const std::size_t>(&sz, 1));
    // First-step Adam: m_hat/(sqrt(v_hat)+eps) = g/|g| up to eps.
    CHECK(params[0] == doctest::Approx(1.0 - 1e-2).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(-2.0 + 1e-2).epsilon(1e-6));
}

TEST_CASE("gradient norm clipping caps the effective norm") {
    Vec params = {0.0, 0.0};
    Vec grads = {3.0, 4.0};  // norm 5
    AdamConfig cfg;
    cfg.lr = 1.0;
    cfg.beta1 = 0.0;
    cfg.beta2 = 0.0;  // first step reveals the clipped gradient direction
    cfg.max_grad_norm = 0.5;
    AdamOptimizer opt(cfg);
    double* pp = params.data();
    const double* gp = grads.data();
    const std::size_t sz = 2;
    opt.step(std::span<double* const>(&pp, 1), std::span<const double* const>(&gp, 1),
             std::span<const std::size_t>(&sz, 1));
    // clipped = 0.5/5 * (3,4) = (0.3, 0.4); step_i = clipped_i/(|clipped_i|+eps)
    CHECK(params[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("adam aborts on NaN gradients without touching parameters") {
    Vec params = {1.0};
    Vec grads = {std::numeric_limits<double>::quiet_NaN()};
    AdamOptimizer opt(AdamConfig{});
    double* pp = params.data();
    const double* gp = grads.data();
    const std::size_t sz = 1;
    CHECK_THROWS_AS(opt.step(std::span<double* const>(&pp, 1),
                             std::span<const double* const>(&gp, 1),
                             std::span<const std::size_t>(&sz, 1)),
                    std::runtime_error);
    CHECK(params[0] == 1.0);
}

TEST_CASE("sigma stays positive for any finite log_sigma") {
    GaussianPolicy p = GaussianPolicy::make(1, {}, 2, 2);
    p.log_sigma = {-40.0, 12.0};
    const Vec s = p.sigma();
    CHECK(s[0] > 0.0);
    CHECK(s[1] > 0.0);
}
