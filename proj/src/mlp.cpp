#include "symrl/mlp.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace symrl {

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

Mlp Mlp::make(int in, const std::vector<int>& hidden, int out, std::uint64_t seed,
              double final_scale) {
    if (in <= 0 || out <= 0) throw std::invalid_argument("Mlp::make: bad dimensions");
    Mlp net;
    std::mt19937_64 rng(seed);
    std::vector<int> dims;
    dims.push_back(in);
    for (int h : hidden) dims.push_back(h);
    dims.push_back(out);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.in = dims[i];
        l.out = dims[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        std::uniform_real_distribution<double> u(-bound, bound);
        l.w.resize(static_cast<std::size_t>(l.in) * l.out);
        l.b.resize(l.out, 0.0);
        const double scale = (i + 2 == dims.size()) ? final_scale : 1.0;
        for (double& w : l.w) w = u(rng) * scale;
        net.layers.push_back(std::move(l));
    }
    return net;
}

MlpGrad MlpGrad::zeros_like(const Mlp& net) {
    MlpGrad g;
    for (const auto& l : net.layers) {
        g.w.emplace_back(l.w.size(), 0.0);
        g.b.emplace_back(l.b.size(), 0.0);
    }
    return g;
}

void MlpGrad::reset() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

std::size_t MlpGrad::param_count() const {
    std::size_t n = 0;
    for (const auto& v : w) n += v.size();
    for (const auto& v : b) n += v.size();
    return n;
}

namespace {

inline void affine(const Mlp::Layer& l, const double* x, double* y) {
    const double* w = l.w.data();
    for (int o = 0; o < l.out; ++o) {
        double s = l.b[o];
        const double* row = w + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) s += row[i] * x[i];
        y[o] = s;
    }
}

}  // namespace

void mlp_forward(const Mlp& net, std::span<const double> x, Vec& out) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    Vec cur(x.begin(), x.end());
    Vec next;
    const std::size_t nl = net.layers.size();
    for (std::size_t li = 0; li < nl; ++li) {
        const auto& l = net.layers[li];
        next.assign(l.out, 0.0);
        affine(l, cur.data(), next.data());
        if (li + 1 < nl)
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        cur.swap(next);
    }
    out = std::move(cur);
}

void mlp_forward(const Mlp& net, std::span<const double> x, MlpCache& cache, Vec& out) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    const std::size_t nl = net.layers.size();
    cache.act.resize(nl + 1);
    cache.act[0].assign(x.begin(), x.end());
    for (std::size_t li = 0; li < nl; ++li) {
        const auto& l = net.layers[li];
        Vec& y = cache.act[li + 1];
        y.assign(l.out, 0.0);
        affine(l, cache.act[li].data(), y.data());
        if (li + 1 < nl)
            for (double& v : y) v = v > 0.0 ? v : 0.0;
    }
    out = cache.act[nl];
}

void mlp_backward(const Mlp& net, const MlpCache& cache, std::span<const double> dout,
                  MlpGrad& grad) {
    const std::size_t nl = net.layers.size();
    if (cache.act.size() != nl + 1) throw std::invalid_argument("mlp_backward: stale cache");
    Vec delta(dout.begin(), dout.end());
    Vec dprev;
    for (std::size_t li = nl; li-- > 0;) {
        const auto& l = net.layers[li];
        const Vec& x = cache.act[li];
        double* gw = grad.w[li].data();
        double* gb = grad.b[li].data();
        for (int o = 0; o < l.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            gb[o] += d;
            double* grow = gw + static_cast<std::size_t>(o) * l.in;
            const double* xp = x.data();
            for (int i = 0; i < l.in; ++i) grow[i] += d * xp[i];
        }
        if (li == 0) break;
        dprev.assign(l.in, 0.0);
        const double* w = l.w.data();
        for (int o = 0; o < l.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* row = w + static_cast<std::size_t>(o) * l.in;
            for (int i = 0; i < l.in; ++i) dprev[i] += d * row[i];
        }
        // ReLU mask of the layer below (its post-activation is cache.act[li]).
        for (int i = 0; i < l.in; ++i)
            if (x[i] <= 0.0) dprev[i] = 0.0;
        delta.swap(dprev);
    }
}

std::uint64_t mlp_param_hash(const Mlp& net) {
    // FNV-1a over the raw parameter bytes.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const Vec& v) {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(v.data());
        for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& l : net.layers) {
        mix(l.w);
        mix(l.b);
    }
    return h;
}

void ParamGroup::add(Vec& p, const Vec& g) {
    if (p.size() != g.size()) throw std::invalid_argument("ParamGroup::add: size mismatch");
    params.push_back(p.data());
    grads.push_back(g.data());
    sizes.push_back(p.size());
}

std::size_t ParamGroup::total() const {
    std::size_t n = 0;
    for (auto s : sizes) n += s;
    return n;
}

void AdamOptimizer::step(std::span<double* const> params, std::span<const double* const> grads,
                         std::span<const std::size_t> sizes) {
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    if (m_.empty()) {
        m_.assign(total, 0.0);
        v_.assign(total, 0.0);
    } else if (m_.size() != total) {
        throw std::invalid_argument("AdamOptimizer::step: parameter group size changed");
    }

    double sq = 0.0;
    for (std::size_t g = 0; g < grads.size(); ++g) {
        const double* gp = grads[g];
        for (std::size_t i = 0; i < sizes[g]; ++i) {
            if (std::isnan(gp[i])) throw std::runtime_error("AdamOptimizer: NaN gradient, update aborted");
            sq += gp[i] * gp[i];
        }
    }
    const double norm = std::sqrt(sq);
    double clip = 1.0;
    if (cfg_.max_grad_norm > 0.0 && norm > cfg_.max_grad_norm) clip = cfg_.max_grad_norm / norm;

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::size_t off = 0;
    for (std::size_t g = 0; g < grads.size(); ++g) {
        double* p = params[g];
        const double* gp = grads[g];
        for (std::size_t i = 0; i < sizes[g]; ++i) {
            const double grad = gp[i] * clip;
            double& m = m_[off + i];
            double& v = v_[off + i];
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad * grad;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
        off += sizes[g];
    }
}

}  // namespace symrl
