#include <catch2/catch_amalgamated.hpp>

#include "bmx/core.hpp"
#include "bmx/rng.hpp"

using namespace bmx;

namespace {

Sym3 random_spd(SplitMix64& rng) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  const Mat3 aat = mat3_mul(a, mat3_transpose(a));
  Sym3 s;
  s.m11 = aat(0, 0) + 0.6;
  s.m12 = aat(0, 1);
  s.m13 = aat(0, 2);
  s.m22 = aat(1, 1) + 0.6;
  s.m23 = aat(1, 2);
  s.m33 = aat(2, 2) + 0.6;
  return s;
}

}  // namespace

TEST_CASE("sym3_det basic values") {
  CHECK(sym3_det(Sym3::identity()) == 1.0);
  CHECK(sym3_det(Sym3::diagonal(2, 3, 4)) == 24.0);
  // rank-deficient: first 2x2 block is all ones
  Sym3 s = Sym3::identity();
  s.m12 = 1.0;
  CHECK(sym3_det(s) == 0.0);
}

TEST_CASE("sym3_inverse basic values and singularity guard") {
  const Sym3 id_inv = sym3_inverse(Sym3::identity());
  CHECK(id_inv.m11 == 1.0);
  CHECK(id_inv.m12 == 0.0);
  CHECK(id_inv.m33 == 1.0);

  const Sym3 d = sym3_inverse(Sym3::diagonal(2, 4, 5));
  CHECK_THAT(d.m11, Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(d.m22, Catch::Matchers::WithinAbs(0.25, 1e-15));
  CHECK_THAT(d.m33, Catch::Matchers::WithinAbs(0.2, 1e-15));

  Sym3 sing = Sym3::identity();
  sing.m12 = 1.0;  // det = 0
  CHECK_THROWS_AS(sym3_inverse(sing), SingularMatrix);
  // scale-aware: a tiny but well-conditioned matrix inverts fine
  CHECK_NOTHROW(sym3_inverse(Sym3::diagonal(1e-8, 1e-8, 1e-8)));
}

TEST_CASE("sym3_inverse round trip on random SPD samples") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Sym3 s = random_spd(rng);
    const Sym3 inv = sym3_inverse(s);
    // multiply back: the product is the oracle
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double p = 0;
        for (int k = 0; k < 3; ++k) p += s(i, k) * inv(k, j);
        CHECK_THAT(p, Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
      }
    }
    const Sym3 twice = sym3_inverse(inv);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK_THAT(twice(i, j), Catch::Matchers::WithinAbs(s(i, j), 1e-10));
    CHECK_THAT(sym3_det(inv) * sym3_det(s),
               Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("sym3_inverse handles poorly conditioned input") {
  // condition number ~1e5, still inside the contract
  Sym3 s;
  s.m11 = 1.0;
  s.m12 = 0.3;
  s.m13 = 0.1;
  s.m22 = 0.5;
  s.m23 = 0.05;
  s.m33 = 1e-5;
  const Sym3 twice = sym3_inverse(sym3_inverse(s));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK_THAT(twice(i, j), Catch::Matchers::WithinAbs(s(i, j), 1e-10));
}

TEST_CASE("mat3_det basic values") {
  CHECK(mat3_det(Mat3::identity()) == 1.0);
  Mat3 perm = Mat3::identity();
  std::swap(perm.m[0], perm.m[3]);
  std::swap(perm.m[1], perm.m[4]);
  std::swap(perm.m[2], perm.m[5]);
  CHECK(mat3_det(perm) == -1.0);
  // frame rows at the spatial origin for the rotation-type group, angle pi/3
  const double a = 3.14159265358979323846 / 3.0;
  Mat3 f;
  f(0, 0) = 0; f(0, 1) = 1; f(0, 2) = 0;
  f(1, 0) = -std::sin(a); f(1, 1) = std::cos(a); f(1, 2) = 0;
  f(2, 0) = 0; f(2, 1) = 0; f(2, 2) = 1;
  CHECK_THAT(mat3_det(f), Catch::Matchers::WithinAbs(std::sin(a), 1e-15));
}

TEST_CASE("epsilon_pair") {
  const Mat3 e13 = epsilon_pair(1, 3);
  CHECK(e13(0, 2) == 1.0);
  CHECK(e13(2, 0) == -1.0);
  for (int i = 0; i < 3; ++i) CHECK(e13(i, i) == 0.0);
  CHECK(e13(0, 1) == 0.0);

  const Mat3 e22 = epsilon_pair(2, 2);
  for (double v : e22.m) CHECK(v == 0.0);

  const Mat3 e23 = epsilon_pair(2, 3);
  CHECK(e23(1, 2) == 1.0);
  CHECK(e23(2, 1) == -1.0);

  CHECK_THROWS_AS(epsilon_pair(0, 1), IndexOutOfRange);
  CHECK_THROWS_AS(epsilon_pair(1, 4), IndexOutOfRange);
}

TEST_CASE("epsilon contraction expansions hold on random SPD samples") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Sym3 eta = random_spd(rng);
    CHECK(epsilon_expansion_residual(eta) < 1e-9);
  }
}
