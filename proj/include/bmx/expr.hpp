#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "bmx/errors.hpp"

namespace bmx::dsl {

/// Parse error with the byte offset of the offending token.
class ParseError : public Error {
public:
  ParseError(std::size_t offset, const std::string& expected)
      : Error("parse error at byte " + std::to_string(offset) + ": " +
              expected),
        offset_(offset),
        expected_(expected) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

/// Evaluation error carrying the offending sub-expression and argument.
class EvalError : public Error {
public:
  EvalError(std::string subexpr, double arg, const std::string& why)
      : Error("eval error in '" + subexpr + "' at argument " +
              std::to_string(arg) + ": " + why),
        subexpr_(std::move(subexpr)),
        arg_(arg) {}

  const std::string& subexpr() const { return subexpr_; }
  double arg() const { return arg_; }

private:
  std::string subexpr_;
  double arg_;
};

enum class NodeKind { number, var_t, const_pi, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, tan, exp, ln, sqrt, abs };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0;        // number
  Func func = Func::sin;   // call
  Expr a, b;               // children
};

inline Expr make_number(double v) {
  return std::make_shared<Node>(Node{NodeKind::number, v, Func::sin, {}, {}});
}
inline Expr make_var() {
  return std::make_shared<Node>(Node{NodeKind::var_t, 0, Func::sin, {}, {}});
}
inline Expr make_pi() {
  return std::make_shared<Node>(Node{NodeKind::const_pi, 0, Func::sin, {}, {}});
}
inline Expr make_neg(Expr a) {
  return std::make_shared<Node>(
      Node{NodeKind::neg, 0, Func::sin, std::move(a), {}});
}
inline Expr make_binary(NodeKind k, Expr a, Expr b) {
  return std::make_shared<Node>(
      Node{k, 0, Func::sin, std::move(a), std::move(b)});
}
inline Expr make_call(Func f, Expr a) {
  return std::make_shared<Node>(
      Node{NodeKind::call, 0, f, std::move(a), {}});
}

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
  }
  return "?";
}

/// Serializes an AST back to source text.  Children of every operator are
/// parenthesized unless atomic, so parse(print(e)) rebuilds the same tree.
inline std::string print(const Expr& e) {
  auto atom_or_paren = [](const Expr& c) {
    std::string s = print(c);
    switch (c->kind) {
      case NodeKind::number:
        if (c->value < 0 || !std::isfinite(c->value)) return "(" + s + ")";
        return s;
      case NodeKind::var_t:
      case NodeKind::const_pi:
      case NodeKind::call:
        return s;
      default:
        return "(" + s + ")";
    }
  };
  switch (e->kind) {
    case NodeKind::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->value);
      return buf;
    }
    case NodeKind::var_t: return "t";
    case NodeKind::const_pi: return "pi";
    case NodeKind::neg: return "-" + atom_or_paren(e->a);
    case NodeKind::add: return atom_or_paren(e->a) + " + " + atom_or_paren(e->b);
    case NodeKind::sub: return atom_or_paren(e->a) + " - " + atom_or_paren(e->b);
    case NodeKind::mul: return atom_or_paren(e->a) + "*" + atom_or_paren(e->b);
    case NodeKind::div: return atom_or_paren(e->a) + "/" + atom_or_paren(e->b);
    case NodeKind::pow: return atom_or_paren(e->a) + "^" + atom_or_paren(e->b);
    case NodeKind::call:
      return std::string(func_name(e->func)) + "(" + print(e->a) + ")";
  }
  return "?";
}

namespace detail {

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;

  explicit Lexer(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() &&
           (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
            src[pos] == '\r'))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c))
      throw ParseError(pos, std::string("expected '") + c + "'");
  }
};

struct Parser {
  Lexer lex;

  explicit Parser(const std::string& s) : lex(s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (static_cast<unsigned char>(s[i]) > 0x7f)
        throw ParseError(i, "non-ASCII byte in input");
    }
  }

  Expr parse_expr() {
    Expr left = parse_term();
    for (;;) {
      if (lex.accept('+'))
        left = make_binary(NodeKind::add, left, parse_term());
      else if (lex.accept('-'))
        left = make_binary(NodeKind::sub, left, parse_term());
      else
        return left;
    }
  }

  Expr parse_term() {
    Expr left = parse_factor();
    for (;;) {
      if (lex.accept('*'))
        left = make_binary(NodeKind::mul, left, parse_factor());
      else if (lex.accept('/'))
        left = make_binary(NodeKind::div, left, parse_factor());
      else
        return left;
    }
  }

  // Unary minus binds looser than '^': -t^2 parses as -(t^2).
  Expr parse_factor() {
    if (lex.accept('-')) return make_neg(parse_factor());
    return parse_power();
  }

  // '^' is right-associative: 2^3^2 = 2^(3^2).
  Expr parse_power() {
    Expr base = parse_atom();
    if (lex.accept('^')) return make_binary(NodeKind::pow, base, parse_factor());
    return base;
  }

  Expr parse_atom() {
    lex.skip_ws();
    if (lex.pos >= lex.src.size())
      throw ParseError(lex.pos, "expected expression");
    const char c = lex.src[lex.pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    if (c == '(') {
      ++lex.pos;
      Expr inner = parse_expr();
      lex.expect(')');
      return inner;
    }
    throw ParseError(lex.pos, "expected number, 't', 'pi', function or '('");
  }

  Expr parse_number() {
    const std::size_t start = lex.pos;
    std::size_t p = lex.pos;
    const std::string& s = lex.src;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p < s.size() && s[p] == '.') {
      ++p;
      while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    }
    if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
      if (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
        ++q;
        while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q])))
          ++q;
        p = q;
      }
    }
    const std::string text = s.substr(start, p - start);
    if (text.empty() || text == ".")
      throw ParseError(start, "malformed number");
    lex.pos = p;
    return make_number(std::stod(text));
  }

  Expr parse_ident() {
    const std::size_t start = lex.pos;
    std::size_t p = lex.pos;
    const std::string& s = lex.src;
    while (p < s.size() && std::isalpha(static_cast<unsigned char>(s[p]))) ++p;
    const std::string name = s.substr(start, p - start);
    lex.pos = p;
    if (name == "t") return make_var();
    if (name == "pi") return make_pi();
    static const std::pair<const char*, Func> funcs[] = {
        {"sin", Func::sin}, {"cos", Func::cos},   {"tan", Func::tan},
        {"exp", Func::exp}, {"ln", Func::ln},     {"sqrt", Func::sqrt},
        {"abs", Func::abs},
    };
    for (const auto& [fname, f] : funcs) {
      if (name == fname) {
        lex.expect('(');
        Expr arg = parse_expr();
        lex.expect(')');
        return make_call(f, arg);
      }
    }
    throw ParseError(start, "unknown identifier '" + name + "'");
  }
};

}  // namespace detail

inline Expr parse(const std::string& source) {
  detail::Parser p(source);
  if (p.lex.at_end()) throw ParseError(0, "expected expression");
  Expr e = p.parse_expr();
  if (!p.lex.at_end())
    throw ParseError(p.lex.pos, "expected end of input");
  return e;
}

inline double eval(const Expr& e, double t) {
  switch (e->kind) {
    case NodeKind::number: return e->value;
    case NodeKind::var_t: return t;
    case NodeKind::const_pi: return 3.14159265358979323846;
    case NodeKind::neg: return -eval(e->a, t);
    case NodeKind::add: return eval(e->a, t) + eval(e->b, t);
    case NodeKind::sub: return eval(e->a, t) - eval(e->b, t);
    case NodeKind::mul: return eval(e->a, t) * eval(e->b, t);
    case NodeKind::div: {
      const double num = eval(e->a, t);
      const double den = eval(e->b, t);
      if (den == 0.0) throw EvalError(print(e), t, "division by zero");
      return num / den;
    }
    case NodeKind::pow: {
      const double base = eval(e->a, t);
      const double expo = eval(e->b, t);
      const double r = std::pow(base, expo);
      if (std::isnan(r))
        throw EvalError(print(e), t, "power outside real domain");
      return r;
    }
    case NodeKind::call: {
      const double x = eval(e->a, t);
      switch (e->func) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::tan: return std::tan(x);
        case Func::exp: return std::exp(x);
        case Func::ln:
          if (x <= 0.0)
            throw EvalError(print(e), t, "ln of non-positive value");
          return std::log(x);
        case Func::sqrt:
          if (x < 0.0)
            throw EvalError(print(e), t, "sqrt of negative value");
          return std::sqrt(x);
        case Func::abs: return std::abs(x);
      }
      return 0;
    }
  }
  return 0;
}

/// Central difference (f(t+h) - f(t-h)) / 2h.
inline double deriv_fd(const Expr& e, double t, double h) {
  return (eval(e, t + h) - eval(e, t - h)) / (2.0 * h);
}

/// Wraps an AST as a plain callable.
inline std::function<double(double)> compile(Expr e) {
  return [e = std::move(e)](double t) { return eval(e, t); };
}

}  // namespace bmx::dsl
