#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bmx/errors.hpp"

namespace bmx {

namespace detail {
inline std::size_t locate(const std::vector<double>& xs, double x) {
  // Clamp to the node range; callers keep evaluation inside it.
  if (x <= xs.front()) return 0;
  if (x >= xs[xs.size() - 2]) return xs.size() - 2;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  return static_cast<std::size_t>(it - xs.begin()) - 1;
}
}  // namespace detail

/// Piecewise cubic Hermite interpolant on (x_i, y_i, y'_i) nodes.  C^1 by
/// construction, which is what the finite-difference stencils downstream
/// require.
class CubicHermite {
public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y,
               std::vector<double> dy)
      : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != dy_.size())
      throw Error("CubicHermite: need matching node arrays of size >= 2");
  }

  double operator()(double x) const {
    const std::size_t i = detail::locate(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * dy_[i] + h01 * y_[i + 1] +
           h11 * h * dy_[i + 1];
  }

  double derivative(double x) const {
    const std::size_t i = detail::locate(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    return d00 * y_[i] + d10 * dy_[i] + d01 * y_[i + 1] + d11 * dy_[i + 1];
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

private:
  std::vector<double> x_, y_, dy_;
};

/// Natural cubic spline on uniform or non-uniform nodes.  C^2, used to lift
/// sampled catalog trajectories to smooth functions before nested
/// finite differencing.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw Error("CubicSpline: need >= 3 nodes");
    // Tridiagonal solve for second derivatives, natural end conditions.
    std::vector<double> m(n, 0.0), diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      diag[i] = 2.0 * (hl + hr);
      upper[i] = hr;
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    std::vector<double> c(n, 0.0);
    // Forward elimination (lower entry of row i is h_{i-1} except at edges).
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double lower = (i == 1) ? 0.0 : hl;
      if (i > 1) {
        const double f = lower / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
      }
    }
    for (std::size_t ii = n - 1; ii-- > 1;) {
      c[ii] = (rhs[ii] - upper[ii] * c[ii + 1]) / diag[ii];
    }
    m2_ = std::move(c);
  }

  double operator()(double x) const {
    const std::size_t i = detail::locate(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m2_[i] + (b * b * b - b) * m2_[i + 1]) * h * h /
               6.0;
  }

  double derivative(double x) const {
    const std::size_t i = detail::locate(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3 * b * b - 1) * m2_[i + 1] - (3 * a * a - 1) * m2_[i]) * h / 6.0;
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

private:
  std::vector<double> x_, y_, m2_;
};

}  // namespace bmx
