#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "bmx/core.hpp"
#include "bmx/errors.hpp"
#include "bmx/group.hpp"
#include "bmx/quad.hpp"

namespace bmx {

struct SpacetimePoint {
  double u0 = 0, u1 = 0, u2 = 0, u3 = 0;
  FramePoint spatial() const { return {u1, u2, u3}; }
};

struct MetricSample {
  Sym3 eta;
  double eta_scalar = 0;  // +sqrt(det eta)
};

/// Time-dependent spatial metric eta_ab(u0) given as six component
/// functions (11, 12, 13, 22, 23, 33).
struct SpatialMetricFn {
  std::array<ScalarFn, 6> comp;

  static SpatialMetricFn identity() {
    SpatialMetricFn f;
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    f.comp = {one, zero, zero, one, zero, one};
    return f;
  }

  MetricSample eval(double t) const {
    MetricSample s;
    s.eta.m11 = comp[0](t);
    s.eta.m12 = comp[1](t);
    s.eta.m13 = comp[2](t);
    s.eta.m22 = comp[3](t);
    s.eta.m23 = comp[4](t);
    s.eta.m33 = comp[5](t);
    const double det = sym3_det(s.eta);
    if (!(det > 0))
      throw NonRiemannianEta("det eta = " + std::to_string(det) + " at u0 = " +
                             std::to_string(t));
    s.eta_scalar = std::sqrt(det);
    return s;
  }
};

/// Frame components alpha_a(u0) of the invariant potential.  An analytic
/// derivative may be attached; otherwise callers fall back to central
/// differences with `h_fd`.
struct PotentialFn {
  std::array<ScalarFn, 3> alpha;
  std::array<ScalarFn, 3> alpha_dot;
  bool has_dot = false;
  double h_fd = 1e-6;

  Vec3 alpha_at(double t) const {
    return {alpha[0](t), alpha[1](t), alpha[2](t)};
  }

  Vec3 alpha_dot_at(double t) const {
    if (has_dot) return {alpha_dot[0](t), alpha_dot[1](t), alpha_dot[2](t)};
    Vec3 d{};
    for (int a = 0; a < 3; ++a)
      d[a] = (alpha[a](t + h_fd) - alpha[a](t - h_fd)) / (2.0 * h_fd);
    return d;
  }
};

struct Metric4 {
  double g[4][4]{};
  double inv[4][4]{};
  double sqrt_neg_g = 0;
};

/// Spacetime metric in the semi-geodesic chart: g00 = -1, g0a = 0,
/// g_ab = l^a l^b eta_ab.  sqrt(-g) = eta_scalar * |det of the dual frame|.
inline Metric4 metric_at(const Group& g, const SpatialMetricFn& eta_fn,
                         const SpacetimePoint& p) {
  const FrameSample fs = frame_at(g, p.spatial());
  const MetricSample ms = eta_fn.eval(p.u0);
  const Sym3 eta_inv = sym3_inverse(ms.eta);

  Metric4 m;
  m.g[0][0] = -1.0;
  m.inv[0][0] = -1.0;
  for (int al = 0; al < 3; ++al) {
    for (int be = 0; be < 3; ++be) {
      double v = 0, w = 0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          v += fs.down(al, a) * ms.eta(a, b) * fs.down(be, b);
          w += fs.up(a, al) * eta_inv(a, b) * fs.up(b, be);
        }
      }
      m.g[al + 1][be + 1] = v;
      m.inv[al + 1][be + 1] = w;
    }
  }
  m.sqrt_neg_g = ms.eta_scalar * std::abs(fs.det_down);
  return m;
}

/// Covariant potential A_i = (0, l^a_alpha alpha_a).
inline Vec4 potential_at(const Group& g, const PotentialFn& pot,
                         const SpacetimePoint& p) {
  const FrameSample fs = frame_at(g, p.spatial());
  const Vec3 a = pot.alpha_at(p.u0);
  Vec4 A{};
  for (int al = 0; al < 3; ++al)
    for (int b = 0; b < 3; ++b) A[al + 1] += fs.down(al, b) * a[b];
  return A;
}

using Mat4 = std::array<std::array<double, 4>, 4>;

/// F_0b = l^a_b d/dt alpha_a, F_ab from the frame commutator contraction.
/// This is an identity of the invariant ansatz, independent of the field
/// equations.
inline Mat4 field_strength_algebraic(const Group& g, const PotentialFn& pot,
                                     const SpacetimePoint& p) {
  const FrameSample fs = frame_at(g, p.spatial());
  const Tensor3x3x3 c = structure_constants(g);
  const Vec3 alpha = pot.alpha_at(p.u0);
  const Vec3 adot = pot.alpha_dot_at(p.u0);

  Mat4 f{};
  for (int be = 0; be < 3; ++be) {
    double v = 0;
    for (int a = 0; a < 3; ++a) v += fs.down(be, a) * adot[a];
    f[0][be + 1] = v;
    f[be + 1][0] = -v;
  }
  // F_{alpha beta} = l^b_beta l^a_alpha C^c_{ba} alpha_c
  for (int al = 0; al < 3; ++al) {
    for (int be = 0; be < 3; ++be) {
      double v = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int cc = 0; cc < 3; ++cc)
            v += fs.down(al, a) * fs.down(be, b) * c(cc, b, a) * alpha[cc];
      f[al + 1][be + 1] = v;
    }
  }
  return f;
}

/// Central-difference curl of the potential in all four coordinates.
inline Mat4 field_strength_numeric(const Group& g, const PotentialFn& pot,
                                   const SpacetimePoint& p, double h) {
  auto potential_shift = [&](int dir, double step) {
    SpacetimePoint q = p;
    (dir == 0 ? q.u0 : dir == 1 ? q.u1 : dir == 2 ? q.u2 : q.u3) += step;
    return potential_at(g, pot, q);
  };
  Vec4 dA[4];
  for (int d = 0; d < 4; ++d) {
    const Vec4 ap = potential_shift(d, h);
    const Vec4 am = potential_shift(d, -h);
    for (int j = 0; j < 4; ++j) dA[d][j] = (ap[j] - am[j]) / (2.0 * h);
  }
  Mat4 f{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) f[i][j] = dA[i][j] - dA[j][i];
  return f;
}

namespace detail {

/// sqrt(-g) F^{ij} with F built numerically; the independent building block
/// of the residual oracle.
inline Mat4 flux_density(const Group& g, const SpatialMetricFn& eta_fn,
                         const PotentialFn& pot, const SpacetimePoint& p,
                         double h) {
  const Metric4 m = metric_at(g, eta_fn, p);
  const Mat4 f_low = field_strength_numeric(g, pot, p, h);
  Mat4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double v = 0;
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          v += m.inv[i][k] * m.inv[j][l] * f_low[k][l];
      out[i][j] = v * m.sqrt_neg_g;
    }
  }
  return out;
}

}  // namespace detail

/// Residual R^i = (sqrt(-g) F^{ij})_{,j} / sqrt(-g) of the source-free
/// field equations, by nested central differences.  Never touches the
/// reduced system: this is the independent oracle.
inline Vec4 maxwell_residual_full(const Group& g, const SpatialMetricFn& eta_fn,
                                  const PotentialFn& pot,
                                  const SpacetimePoint& p, double h) {
  const Metric4 m = metric_at(g, eta_fn, p);
  Vec4 r{};
  for (int j = 0; j < 4; ++j) {
    SpacetimePoint pp = p, pm = p;
    (j == 0 ? pp.u0 : j == 1 ? pp.u1 : j == 2 ? pp.u2 : pp.u3) += h;
    (j == 0 ? pm.u0 : j == 1 ? pm.u1 : j == 2 ? pm.u2 : pm.u3) -= h;
    const Mat4 fp = detail::flux_density(g, eta_fn, pot, pp, h);
    const Mat4 fm = detail::flux_density(g, eta_fn, pot, pm, h);
    for (int i = 0; i < 4; ++i)
      r[i] += (fp[i][j] - fm[i][j]) / (2.0 * h);
  }
  for (int i = 0; i < 4; ++i) r[i] /= m.sqrt_neg_g;
  return r;
}

inline double max_abs(const Vec4& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace bmx
