#include "symrl/numerics.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace symrl {

RunningWindow::RunningWindow(std::size_t capacity, std::size_t dim)
    : capacity_(capacity), dim_(dim) {
    if (capacity == 0 || dim == 0)
        throw std::invalid_argument("RunningWindow: capacity and dim must be positive");
    data_.resize(capacity_ * dim_, 0.0);
}

void RunningWindow::push(std::span<const double> sample) {
    if (sample.size() != dim_)
        throw std::invalid_argument("RunningWindow::push: sample dimension mismatch");
    double* row = data_.data() + next_ * dim_;
    for (std::size_t i = 0; i < dim_; ++i) row[i] = sample[i];
    next_ = (next_ + 1) % capacity_;
    if (count_ < capacity_) ++count_;
}

Vec RunningWindow::mean() const {
    if (count_ == 0) throw std::invalid_argument("RunningWindow::mean: empty window");
    Vec out(dim_, 0.0);
    for (std::size_t r = 0; r < count_; ++r) {
        const double* row = data_.data() + r * dim_;
        for (std::size_t i = 0; i < dim_; ++i) out[i] += row[i];
    }
    for (double& v : out) v /= static_cast<double>(count_);
    return out;
}

Vec RunningWindow::mad() const {
    // Two passes: mean first, then absolute deviations.
    Vec mu = mean();
    Vec out(dim_, 0.0);
    for (std::size_t r = 0; r < count_; ++r) {
        const double* row = data_.data() + r * dim_;
        for (std::size_t i = 0; i < dim_; ++i) out[i] += std::abs(row[i] - mu[i]);
    }
    for (double& v : out) v /= static_cast<double>(count_);
    return out;
}

void RunningWindow::serialize(std::ostream& out) const {
    out << capacity_ << ' ' << dim_ << ' ' << count_ << ' ' << next_ << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < count_ * dim_; ++i) out << data_[i] << ' ';
    out << '\n';
}

RunningWindow RunningWindow::deserialize(std::istream& in) {
    std::size_t cap, dim, count, next;
    if (!(in >> cap >> dim >> count >> next))
        throw std::runtime_error("RunningWindow::deserialize: malformed stream");
    RunningWindow w(cap, dim);
    w.count_ = count;
    w.next_ = next;
    for (std::size_t i = 0; i < count * dim; ++i)
        if (!(in >> w.data_[i]))
            throw std::runtime_error("RunningWindow::deserialize: truncated data");
    return w;
}

double gaussian_log_density(std::span<const double> x, std::span<const double> mu,
                            std::span<const double> sigma) {
    const std::size_t n = x.size();
    if (mu.size() != n || sigma.size() != n)
        throw std::invalid_argument("gaussian_log_density: length mismatch");
    double logp = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0))
            throw std::domain_error("gaussian_log_density: sigma must be positive");
        const double z = (x[i] - mu[i]) / sigma[i];
        logp -= std::log(sigma[i]) + 0.5 * z * z;
    }
    return logp;
}

double inverse_pdf_largest(double p, double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("inverse_pdf_largest: sigma must be positive");
    if (!(p > 0.0)) throw std::domain_error("inverse_pdf_largest: density must be positive");
    const double beta = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    if (p > beta)
        throw std::domain_error("inverse_pdf_largest: density exceeds the distribution peak");
    const double ratio = p / beta;
    // ratio in (0, 1]; log is <= 0, radicand >= 0 up to rounding.
    const double radicand = std::max(0.0, -2.0 * std::log(ratio));
    return mu + sigma * std::sqrt(radicand);
}

LineFit ols_fit_mb(const Dataset1D& d) {
    const std::size_t u = d.size();
    if (u < 2) throw std::invalid_argument("ols_fit_mb: need at least 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
        sx += d.xs[i];
        sy += d.ys[i];
        sxx += d.xs[i] * d.xs[i];
        sxy += d.xs[i] * d.ys[i];
    }
    const double un = static_cast<double>(u);
    const double denom = un * sxx - sx * sx;
    const double scale = un * sxx + sx * sx;
    if (std::abs(denom) <= 1e-12 * std::max(1.0, scale))
        throw std::domain_error("ols_fit_mb: degenerate design (all xs equal)");
    const double m = (un * sxy - sx * sy) / denom;
    const double b = (sy - m * sx) / un;
    return {m, b};
}

double ols_fit_b_single(const Dataset1D& d) {
    const std::size_t u = d.size();
    if (u == 0) throw std::invalid_argument("ols_fit_b_single: empty dataset");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
        sx += d.xs[i];
        sy += d.ys[i];
    }
    return (sx + sy) / static_cast<double>(u);
}

double ols_fit_m_fixed_b(const Dataset1D& d) {
    const std::size_t u = d.size();
    if (u == 0) throw std::invalid_argument("ols_fit_m_fixed_b: empty dataset");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
        sxx += d.xs[i] * d.xs[i];
        sxy += d.xs[i] * d.ys[i];
    }
    if (!(sxx > 0.0)) throw std::domain_error("ols_fit_m_fixed_b: degenerate design (all xs zero)");
    return sxy / sxx;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double linf_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace symrl
