#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace symrl {

using Vec = std::vector<double>;

/// One-dimensional regression dataset: paired scalar inputs/outputs.
struct Dataset1D {
    Vec xs;
    Vec ys;

    std::size_t size() const { return xs.size(); }
    void add(double x, double y) {
        xs.push_back(x);
        ys.push_back(y);
    }
};

/// Ring buffer of fixed-size sample vectors with windowed statistics.
/// Single-writer; mean/MAD queries require at least one sample.
class RunningWindow {
public:
    RunningWindow(std::size_t capacity, std::size_t dim);

    void push(std::span<const double> sample);
    std::size_t size() const { return count_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return count_ == 0; }

    /// Per-element mean over retained samples.
    Vec mean() const;
    /// Per-element mean absolute deviation around the window mean.
    Vec mad() const;

    void serialize(std::ostream& out) const;
    static RunningWindow deserialize(std::istream& in);

private:
    std::size_t capacity_;
    std::size_t dim_;
    std::size_t count_ = 0;
    std::size_t next_ = 0;
    Vec data_;  // capacity x dim, row-major
};

/// Log density of a diagonal Gaussian. Throws on non-positive sigma or
/// mismatched lengths.
double gaussian_log_density(std::span<const double> x, std::span<const double> mu,
                            std::span<const double> sigma);

/// Largest x with pdf(x | mu, sigma) == p. Requires 0 < p <= 1/(sigma*sqrt(2*pi)).
double inverse_pdf_largest(double p, double mu, double sigma);

/// Closed-form least squares line y = m*x + b. Requires >= 2 points and a
/// non-degenerate design (not all xs equal).
struct LineFit {
    double m;
    double b;
};
LineFit ols_fit_mb(const Dataset1D& d);

/// Intercept of the involutory line y = -x + b.
double ols_fit_b_single(const Dataset1D& d);

/// Slope of y = m*x through the origin. Requires sum(x^2) > 0.
double ols_fit_m_fixed_b(const Dataset1D& d);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double linf_distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

}  // namespace symrl
