#pragma once

#include <array>
#include <cmath>
#include <string>

#include "bmx/errors.hpp"

namespace bmx {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

/// Symmetric 3x3 matrix.  Only the six independent entries are stored, so
/// symmetry holds by construction.
struct Sym3 {
  double m11 = 0, m12 = 0, m13 = 0, m22 = 0, m23 = 0, m33 = 0;

  /// Entry access with 0-based indices.
  double operator()(int i, int j) const {
    const int a = i < j ? i : j;
    const int b = i < j ? j : i;
    if (a == 0) return b == 0 ? m11 : (b == 1 ? m12 : m13);
    if (a == 1) return b == 1 ? m22 : m23;
    return m33;
  }

  static Sym3 identity() { return Sym3{1, 0, 0, 1, 0, 1}; }
  static Sym3 diagonal(double a, double b, double c) {
    return Sym3{a, 0, 0, b, 0, c};
  }

  double max_abs_entry() const {
    double m = 0;
    for (double v : {m11, m12, m13, m22, m23, m33}) m = std::max(m, std::abs(v));
    return m;
  }
};

/// General 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 e;
    e(0, 0) = e(1, 1) = e(2, 2) = 1;
    return e;
  }

  double max_abs_entry() const {
    double v = 0;
    for (double x : m) v = std::max(v, std::abs(x));
    return v;
  }
};

/// 3x3x3 array indexed (c, a, b).  When it holds structure constants the
/// lower index pair is antisymmetric: T(c,a,b) = -T(c,b,a).
struct Tensor3x3x3 {
  std::array<double, 27> m{};

  double& operator()(int c, int a, int b) { return m[9 * c + 3 * a + b]; }
  double operator()(int c, int a, int b) const { return m[9 * c + 3 * a + b]; }
};

inline double sym3_det(const Sym3& s) {
  return s.m11 * (s.m22 * s.m33 - s.m23 * s.m23) -
         s.m12 * (s.m12 * s.m33 - s.m13 * s.m23) +
         s.m13 * (s.m12 * s.m23 - s.m13 * s.m22);
}

inline double mat3_det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

namespace detail {
// Scale-aware singularity guard: |det| <= 1e-12 * (max |entry|)^3.
inline double singular_threshold(double max_abs) {
  return 1e-12 * max_abs * max_abs * max_abs;
}
}  // namespace detail

inline Sym3 sym3_inverse(const Sym3& s) {
  const double det = sym3_det(s);
  if (std::abs(det) <= detail::singular_threshold(s.max_abs_entry())) {
    throw SingularMatrix("sym3_inverse: determinant " + std::to_string(det) +
                         " below singularity threshold");
  }
  Sym3 r;
  r.m11 = (s.m22 * s.m33 - s.m23 * s.m23) / det;
  r.m12 = (s.m13 * s.m23 - s.m12 * s.m33) / det;
  r.m13 = (s.m12 * s.m23 - s.m13 * s.m22) / det;
  r.m22 = (s.m11 * s.m33 - s.m13 * s.m13) / det;
  r.m23 = (s.m12 * s.m13 - s.m11 * s.m23) / det;
  r.m33 = (s.m11 * s.m22 - s.m12 * s.m12) / det;
  return r;
}

inline Mat3 mat3_inverse(const Mat3& a) {
  const double det = mat3_det(a);
  if (std::abs(det) <= detail::singular_threshold(a.max_abs_entry())) {
    throw SingularMatrix("mat3_inverse: determinant " + std::to_string(det) +
                         " below singularity threshold");
  }
  Mat3 r;
  r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
  r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
  r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
  r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
  r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
  r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
  r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
  r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
  r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
  return r;
}

inline Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat3 mat3_transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

inline Mat3 sym3_to_mat3(const Sym3& s) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = s(i, j);
  return r;
}

inline Vec3 mat3_apply(const Mat3& a, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += a(i, j) * v[j];
  return r;
}

inline Vec3 sym3_apply(const Sym3& s, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += s(i, j) * v[j];
  return r;
}

/// Antisymmetrized index pair eps^{AB}_{ab} = d^A_a d^B_b - d^A_b d^B_a.
/// A and B are the 1-based labels of the superscript pair; the returned
/// matrix is indexed 0-based in (a, b).
inline Mat3 epsilon_pair(int A, int B) {
  if (A < 1 || A > 3 || B < 1 || B > 3) {
    throw IndexOutOfRange("epsilon_pair: labels must lie in {1,2,3}, got (" +
                          std::to_string(A) + "," + std::to_string(B) + ")");
  }
  Mat3 e;
  e(A - 1, B - 1) += 1.0;
  e(B - 1, A - 1) -= 1.0;
  return e;
}

/// Max relative componentwise residual of the three cofactor expansions of
/// eps^{AB} contracted with the inverse of eta, evaluated for one SPD eta.
/// Each expansion rewrites eta^2 eps^{AB}_{cd} eta^{ac} eta^{bd} as a
/// combination of eta entries against the complementary eps pairs.
inline double epsilon_expansion_residual(const Sym3& eta) {
  const Sym3 inv = sym3_inverse(eta);
  const double det = sym3_det(eta);

  struct Row {
    int A, B;
    double w12, w31, w23;  // weights of eps_12, eps_31, eps_23
  };
  const Row rows[3] = {
      {1, 2, eta.m33, eta.m23, eta.m13},
      {3, 1, eta.m23, eta.m22, eta.m12},
      {2, 3, eta.m13, eta.m12, eta.m11},
  };

  const Mat3 e12 = epsilon_pair(1, 2);
  const Mat3 e31 = epsilon_pair(3, 1);
  const Mat3 e23 = epsilon_pair(2, 3);

  double worst = 0;
  for (const Row& row : rows) {
    const Mat3 eps = epsilon_pair(row.A, row.B);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double lhs = 0;
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) lhs += eps(c, d) * inv(a, c) * inv(b, d);
        lhs *= det;
        const double rhs = row.w12 * e12(a, b) + row.w31 * e31(a, b) +
                           row.w23 * e23(a, b);
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
      }
    }
  }
  return worst;
}

}  // namespace bmx
