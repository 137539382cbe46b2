#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bmx/expr.hpp"
#include "bmx/rng.hpp"

using namespace bmx;
using dsl::Expr;

TEST_CASE("parse and evaluate basics") {
  CHECK(dsl::eval(dsl::parse("1 + 2*3"), 0.0) == 7.0);
  for (double t : {0.0, 0.7, 3.9}) {
    CHECK_THAT(dsl::eval(dsl::parse("sin(t)^2 + cos(t)^2"), t),
               Catch::Matchers::WithinAbs(1.0, 1e-15));
  }
  CHECK_THAT(dsl::eval(dsl::parse("exp(-t*cos(pi/4))"), 0.0),
             Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK(dsl::eval(dsl::parse("t^2"), 3.0) == 9.0);
}

TEST_CASE("numeric literal forms") {
  CHECK(dsl::eval(dsl::parse(".5"), 0.0) == 0.5);
  CHECK(dsl::eval(dsl::parse("1e3"), 0.0) == 1000.0);
  CHECK(dsl::eval(dsl::parse("2.5e-3"), 0.0) == 0.0025);
  CHECK(dsl::eval(dsl::parse("1.25E2"), 0.0) == 125.0);
  CHECK(dsl::eval(dsl::parse("7."), 0.0) == 7.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(dsl::eval(dsl::parse("2+3*4^2"), 0.0) == 50.0);
  CHECK(dsl::eval(dsl::parse("-t^2"), 3.0) == -9.0);
  CHECK(dsl::eval(dsl::parse("2^3^2"), 0.0) == 512.0);
  CHECK(dsl::eval(dsl::parse("2^-1"), 0.0) == 0.5);
  CHECK(dsl::eval(dsl::parse("10 - 4 - 3"), 0.0) == 3.0);  // left assoc
  CHECK(dsl::eval(dsl::parse("(1 + 2)*3"), 0.0) == 9.0);
}

TEST_CASE("domain violations raise EvalError instead of NaN") {
  CHECK_THROWS_AS(dsl::eval(dsl::parse("ln(t)"), 0.0), dsl::EvalError);
  CHECK_THROWS_AS(dsl::eval(dsl::parse("sqrt(4 - t)"), 5.0), dsl::EvalError);
  CHECK_THROWS_AS(dsl::eval(dsl::parse("1/t"), 0.0), dsl::EvalError);
  CHECK_THROWS_AS(dsl::eval(dsl::parse("(0-2)^0.5"), 0.0), dsl::EvalError);
  try {
    dsl::eval(dsl::parse("ln(t - 1)"), 0.5);
    FAIL("expected EvalError");
  } catch (const dsl::EvalError& e) {
    CHECK(e.subexpr().find("ln") != std::string::npos);
    CHECK(e.arg() == 0.5);
  }
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    dsl::parse("1 +");
    FAIL("expected ParseError");
  } catch (const dsl::ParseError& e) {
    CHECK(e.offset() == 3);
  }
  CHECK_THROWS_AS(dsl::parse(""), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("foo(t)"), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("(1 + t"), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("1 + t)"), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("sin t"), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("2 ** 3"), dsl::ParseError);
  CHECK_THROWS_AS(dsl::parse("t\xcf\x80"), dsl::ParseError);  // non-ASCII
}

TEST_CASE("deriv_fd on the worked values") {
  CHECK_THAT(dsl::deriv_fd(dsl::parse("t^2"), 1.0, 1e-5),
             Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(dsl::deriv_fd(dsl::parse("sin(t)"), 0.0, 1e-5),
             Catch::Matchers::WithinAbs(std::cos(0.0), 1e-10));
  CHECK(dsl::deriv_fd(dsl::parse("5"), 17.0, 1e-5) == 0.0);
}

TEST_CASE("deriv_fd is second order") {
  const Expr e = dsl::parse("exp(sin(2*t))");
  const double t = 0.4;
  // exact derivative: 2 cos(2t) exp(sin(2t))
  const double exact = 2.0 * std::cos(0.8) * std::exp(std::sin(0.8));
  const double e1 = std::abs(dsl::deriv_fd(e, t, 1e-3) - exact);
  const double e2 = std::abs(dsl::deriv_fd(e, t, 5e-4) - exact);
  CHECK(e1 / e2 >= 3.5);
}

namespace {

// Random AST generator for the round-trip property.  ln and sqrt only ever
// see manifestly safe arguments.
dsl::Expr random_ast(SplitMix64& rng, int depth) {
  using namespace dsl;
  const auto leaf = [&]() -> Expr {
    switch (rng.next_u64() % 3) {
      case 0: return make_number(std::round(rng.uniform(-20, 20) * 8) / 8.0);
      case 1: return make_var();
      default: return make_pi();
    }
  };
  if (depth <= 0) return leaf();
  switch (rng.next_u64() % 8) {
    case 0: return leaf();
    case 1: return make_neg(random_ast(rng, depth - 1));
    case 2:
      return make_binary(NodeKind::add, random_ast(rng, depth - 1),
                         random_ast(rng, depth - 1));
    case 3:
      return make_binary(NodeKind::sub, random_ast(rng, depth - 1),
                         random_ast(rng, depth - 1));
    case 4:
      return make_binary(NodeKind::mul, random_ast(rng, depth - 1),
                         random_ast(rng, depth - 1));
    case 5: {
      // keep the divisor away from zero: 2 + abs(...)
      Expr den = make_binary(NodeKind::add, make_number(2.0),
                             make_call(Func::abs, random_ast(rng, depth - 1)));
      return make_binary(NodeKind::div, random_ast(rng, depth - 1), den);
    }
    case 6: {
      Expr base = make_call(Func::abs, random_ast(rng, depth - 1));
      return make_binary(NodeKind::pow,
                         make_binary(NodeKind::add, make_number(1.0), base),
                         make_number(double(rng.next_u64() % 3) + 1.0));
    }
    default: {
      Expr arg = random_ast(rng, depth - 1);
      switch (rng.next_u64() % 5) {
        case 0: return make_call(Func::sin, arg);
        case 1: return make_call(Func::cos, arg);
        case 2: return make_call(Func::exp, make_call(Func::sin, arg));
        case 3:
          return make_call(Func::sqrt, make_call(Func::abs, arg));
        default:
          return make_call(
              Func::ln, make_binary(NodeKind::add, make_number(1.0),
                                    make_call(Func::abs, arg)));
      }
    }
  }
}

}  // namespace

TEST_CASE("print/parse round trip evaluates identically") {
  SplitMix64 rng(99);
  for (int i = 0; i < 50; ++i) {
    const dsl::Expr e = random_ast(rng, 5);
    const std::string text = dsl::print(e);
    const dsl::Expr back = dsl::parse(text);
    for (int k = 0; k < 10; ++k) {
      const double t = rng.uniform(-3.0, 3.0);
      const double a = dsl::eval(e, t);
      const double b = dsl::eval(back, t);
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      CHECK(std::abs(a - b) / scale < 1e-14);
    }
  }
}
