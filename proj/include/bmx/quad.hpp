#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "bmx/errors.hpp"

namespace bmx {

using ScalarFn = std::function<double(double)>;

namespace detail {

inline double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const ScalarFn& f, double a, double fa,
                                   double b, double fb, double m, double fm,
                                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, flm, m, fm);
  const double right = simpson(m, fm, frm, b, fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw QuadratureFailure("adaptive Simpson: tolerance unreachable on [" +
                            std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] (a may exceed b).
inline double integrate_adaptive(const ScalarFn& f, double a, double b,
                                 double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = detail::simpson(a, fa, fm, b, fb);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol,
                                      max_depth);
}

/// Composite Simpson with n panels (n rounded up to even).
inline double integrate_fixed_simpson(const ScalarFn& f, double a, double b,
                                      int n) {
  if (a == b) return 0.0;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace bmx
