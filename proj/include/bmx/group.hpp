#pragma once

#include <cmath>
#include <string>

#include "bmx/core.hpp"
#include "bmx/errors.hpp"

namespace bmx {

enum class GroupKind { I, II, III, IV, V, VI, VII };

inline const char* group_name(GroupKind k) {
  switch (k) {
    case GroupKind::I: return "I";
    case GroupKind::II: return "II";
    case GroupKind::III: return "III";
    case GroupKind::IV: return "IV";
    case GroupKind::V: return "V";
    case GroupKind::VI: return "VI";
    case GroupKind::VII: return "VII";
  }
  return "?";
}

inline GroupKind parse_group_kind(const std::string& s) {
  if (s == "I") return GroupKind::I;
  if (s == "II") return GroupKind::II;
  if (s == "III") return GroupKind::III;
  if (s == "IV") return GroupKind::IV;
  if (s == "V") return GroupKind::V;
  if (s == "VI") return GroupKind::VI;
  if (s == "VII") return GroupKind::VII;
  throw ConfigError("unknown group kind '" + s + "'");
}

/// One of the solvable three-parameter symmetry groups.  Kinds I-VI are
/// fully determined by the fixed parameter triple (k, n, eps); kind VII
/// carries a free angle with sin(angle) != 0.
class Group {
public:
  static Group make(GroupKind kind) {
    if (kind == GroupKind::VII)
      throw ConfigError("group VII requires an angle parameter");
    Group g;
    g.kind_ = kind;
    switch (kind) {
      case GroupKind::I: break;                                  // k=n=eps=0
      case GroupKind::II: g.eps_ = 1; break;                     // k=n=0
      case GroupKind::III: g.k_ = 1; break;                      // n=eps=0
      case GroupKind::IV: g.k_ = g.n_ = g.eps_ = 1; break;
      case GroupKind::V: g.k_ = g.n_ = 1; break;                 // eps=0
      case GroupKind::VI: g.k_ = 1; g.n_ = 2; break;             // eps=0
      case GroupKind::VII: break;
    }
    return g;
  }

  static Group make_vii(double angle) {
    if (std::abs(std::sin(angle)) < 1e-8)
      throw ConfigError("group VII angle " + std::to_string(angle) +
                        " degenerates the frame (|sin| < 1e-8)");
    Group g;
    g.kind_ = GroupKind::VII;
    g.angle_ = angle;
    return g;
  }

  GroupKind kind() const { return kind_; }
  double k() const { return k_; }
  double n() const { return n_; }
  double eps() const { return eps_; }
  double angle() const { return angle_; }
  double cos_angle() const { return std::cos(angle_); }
  const char* name() const { return group_name(kind_); }

  bool beta3_constrained() const {
    // Nonzero frame divergence forces beta^3 = 0.
    return kind_ != GroupKind::I && kind_ != GroupKind::II;
  }

private:
  Group() = default;
  GroupKind kind_ = GroupKind::I;
  double k_ = 0, n_ = 0, eps_ = 0;
  double angle_ = 0;  // kind VII only
};

/// Spatial point (u1, u2, u3).
using FramePoint = Vec3;

/// Invariant frame at a point.  Row a of `up` is the vector field Y_a in
/// coordinate components; column a of `down` is the dual covector, so
/// up * down = identity and down(alpha, a) pairs coordinate row alpha with
/// frame column a.
struct FrameSample {
  Mat3 up;
  Mat3 down;
  double det_up = 0;    // det of `up`
  double det_down = 0;  // det of `down` = 1 / det_up
};

inline Tensor3x3x3 structure_constants(const Group& g) {
  Tensor3x3x3 c;
  auto set = [&c](int cc, int a, int b, double v) {
    c(cc - 1, a - 1, b - 1) = v;
    c(cc - 1, b - 1, a - 1) = -v;
  };
  if (g.kind() == GroupKind::VII) {
    set(1, 2, 3, -1.0);
    set(2, 2, 3, 2.0 * g.cos_angle());
    set(2, 1, 3, 1.0);
  } else {
    if (g.k() != 0) set(1, 1, 3, g.k());
    if (g.eps() != 0) set(1, 2, 3, g.eps());
    if (g.n() != 0) set(2, 2, 3, g.n());
  }
  return c;
}

/// Closed-form frame divergence omega_a; position independent for every
/// catalog group (verified numerically by frame_divergence tests).
inline Vec3 frame_omega(const Group& g) {
  if (g.kind() == GroupKind::VII) return {0.0, 0.0, 2.0 * g.cos_angle()};
  return {0.0, 0.0, g.k() + g.n()};
}

inline FrameSample frame_at(const Group& g, const FramePoint& p) {
  const double u3 = p[2];
  Mat3 up;
  if (g.kind() == GroupKind::VII) {
    const double q3 = u3 * g.cos_angle();
    const double p3 = u3 * std::sin(g.angle());
    const double e = std::exp(-q3);
    up(0, 0) = e * std::sin(p3);
    up(0, 1) = e * std::cos(p3);
    up(1, 0) = e * std::sin(p3 - g.angle());
    up(1, 1) = e * std::cos(p3 - g.angle());
    up(2, 2) = 1.0;
  } else {
    const double ek = std::exp(-g.k() * u3);
    const double en = std::exp(-g.n() * u3);
    up(0, 0) = ek;
    up(1, 0) = -g.eps() * u3 * ek;
    up(1, 1) = en;
    up(2, 2) = 1.0;
  }
  FrameSample fs;
  fs.up = up;
  fs.det_up = mat3_det(up);
  if (!std::isfinite(fs.det_up) ||
      std::abs(fs.det_up) <= detail::singular_threshold(up.max_abs_entry()))
    throw DegenerateFrame("frame determinant " + std::to_string(fs.det_up) +
                          " at u3 = " + std::to_string(u3));
  fs.down = mat3_inverse(up);
  fs.det_down = mat3_det(fs.down);
  return fs;
}

/// omega_a = l^alpha_{a,alpha} + l_{|a} / l via central differences of the
/// frame fields, with l = det of the dual frame.
inline Vec3 frame_divergence(const Group& g, const FramePoint& p, double h) {
  FrameSample plus[3], minus[3];
  for (int d = 0; d < 3; ++d) {
    FramePoint pp = p, pm = p;
    pp[d] += h;
    pm[d] -= h;
    plus[d] = frame_at(g, pp);
    minus[d] = frame_at(g, pm);
  }
  const FrameSample c = frame_at(g, p);
  Vec3 omega{};
  for (int a = 0; a < 3; ++a) {
    double div = 0;
    for (int al = 0; al < 3; ++al)
      div += (plus[al].up(a, al) - minus[al].up(a, al)) / (2.0 * h);
    double l_dir = 0;  // l_{|a} = l^alpha_a d_alpha l
    for (int al = 0; al < 3; ++al)
      l_dir += c.up(a, al) * (plus[al].det_down - minus[al].det_down) / (2.0 * h);
    omega[a] = div + l_dir / c.det_down;
  }
  return omega;
}

/// Max |[Y_a, Y_b]^alpha - C^c_{ab} l^alpha_c| over a < b using central
/// differences of the frame with step h.
inline double verify_commutators(const Group& g, const FramePoint& p, double h) {
  const Tensor3x3x3 c = structure_constants(g);
  const FrameSample fs = frame_at(g, p);
  FrameSample plus[3], minus[3];
  for (int d = 0; d < 3; ++d) {
    FramePoint pp = p, pm = p;
    pp[d] += h;
    pm[d] -= h;
    plus[d] = frame_at(g, pp);
    minus[d] = frame_at(g, pm);
  }
  auto dup = [&](int a, int al, int d) {
    return (plus[d].up(a, al) - minus[d].up(a, al)) / (2.0 * h);
  };
  double worst = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (int al = 0; al < 3; ++al) {
        double comm = 0;
        for (int be = 0; be < 3; ++be)
          comm += fs.up(a, be) * dup(b, al, be) - fs.up(b, be) * dup(a, al, be);
        double target = 0;
        for (int cc = 0; cc < 3; ++cc) target += c(cc, a, b) * fs.up(cc, al);
        worst = std::max(worst, std::abs(comm - target));
      }
    }
  }
  return worst;
}

/// Max |C^e_{ab} C^d_{ec} + cyclic| over all free indices.
inline double jacobi_residual(const Group& g) {
  const Tensor3x3x3 c = structure_constants(g);
  double worst = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc)
        for (int d = 0; d < 3; ++d) {
          double s = 0;
          for (int e = 0; e < 3; ++e) {
            s += c(e, a, b) * c(d, e, cc) + c(e, b, cc) * c(d, e, a) +
                 c(e, cc, a) * c(d, e, b);
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace bmx
