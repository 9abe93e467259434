#pragma once

// Expression trees for holomorphic right-hand sides f(z).
//
// Grammar (whitespace insignificant, no implicit multiplication):
//   expr   := term { ("+"|"-") term }
//   term   := factor { ("*"|"/") factor }
//   factor := unary [ "^" uint ]
//   unary  := [ "-" ] atom
//   atom   := number | "z" | "i" | "pi" | "e" | ident "(" expr ")" | "(" expr ")"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "sepkit/core.hpp"

namespace sepkit {

enum class Op {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,
  Cosh,
  Sinh,
  Cos,
  Sin,
  Exp,
  Tanh,
  Tan,
  Log,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Constant;
  Complex value{};    // Constant
  unsigned power = 0; // Pow
  NodePtr lhs;        // unary operand / left operand
  NodePtr rhs;        // right operand
};

namespace expr {

inline constexpr std::array<std::pair<std::string_view, Op>, 8> functions{{
    {"cosh", Op::Cosh},
    {"sinh", Op::Sinh},
    {"cos", Op::Cos},
    {"sin", Op::Sin},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"tan", Op::Tan},
    {"tanh", Op::Tanh},
}};

inline std::optional<Op> function_op(std::string_view name) {
  for (const auto& [n, op] : functions) {
    if (n == name) return op;
  }
  return std::nullopt;
}

inline std::string_view function_name(Op op) {
  for (const auto& [n, o] : functions) {
    if (o == op) return n;
  }
  return {};
}

inline bool is_function(Op op) { return !function_name(op).empty(); }

// Raw constructors: no folding. Used by the parser so that the tree mirrors the text.

inline NodePtr constant(Complex v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return n;
}

inline NodePtr variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  return n;
}

inline NodePtr unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

inline NodePtr binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline NodePtr power(NodePtr a, unsigned k) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->power = k;
  n->lhs = std::move(a);
  return n;
}

// Folding constructors for derivative trees. They only drop additive zeros and
// multiplicative ones/zeros; no other simplification is attempted.

inline bool is_constant(const NodePtr& n, Complex v) {
  return n->op == Op::Constant && n->value == v;
}

inline NodePtr add(NodePtr a, NodePtr b) {
  if (is_constant(a, 0.0)) return b;
  if (is_constant(b, 0.0)) return a;
  return binary(Op::Add, std::move(a), std::move(b));
}

inline NodePtr neg(NodePtr a) {
  if (a->op == Op::Constant) return constant(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return unary(Op::Neg, std::move(a));
}

inline NodePtr sub(NodePtr a, NodePtr b) {
  if (is_constant(b, 0.0)) return a;
  if (is_constant(a, 0.0)) return neg(std::move(b));
  return binary(Op::Sub, std::move(a), std::move(b));
}

inline NodePtr mul(NodePtr a, NodePtr b) {
  if (is_constant(a, 0.0) || is_constant(b, 0.0)) return constant(0.0);
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  if (a->op == Op::Constant && b->op == Op::Constant) return constant(a->value * b->value);
  return binary(Op::Mul, std::move(a), std::move(b));
}

inline NodePtr div(NodePtr a, NodePtr b) {
  if (is_constant(a, 0.0)) return constant(0.0);
  if (is_constant(b, 1.0)) return a;
  return binary(Op::Div, std::move(a), std::move(b));
}

inline NodePtr pow(NodePtr a, unsigned k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  return power(std::move(a), k);
}

inline Complex integer_power(Complex base, unsigned k) {
  Complex result = 1.0;
  while (k != 0) {
    if (k & 1u) result *= base;
    base *= base;
    k >>= 1u;
  }
  return result;
}

inline Complex evaluate(const Node& n, Complex z) {
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Variable: return z;
    case Op::Add: return evaluate(*n.lhs, z) + evaluate(*n.rhs, z);
    case Op::Sub: return evaluate(*n.lhs, z) - evaluate(*n.rhs, z);
    case Op::Mul: return evaluate(*n.lhs, z) * evaluate(*n.rhs, z);
    case Op::Div: return evaluate(*n.lhs, z) / evaluate(*n.rhs, z);
    case Op::Neg: return -evaluate(*n.lhs, z);
    case Op::Pow: return integer_power(evaluate(*n.lhs, z), n.power);
    case Op::Cosh: return std::cosh(evaluate(*n.lhs, z));
    case Op::Sinh: return std::sinh(evaluate(*n.lhs, z));
    case Op::Cos: return std::cos(evaluate(*n.lhs, z));
    case Op::Sin: return std::sin(evaluate(*n.lhs, z));
    case Op::Exp: return std::exp(evaluate(*n.lhs, z));
    case Op::Tanh: return std::tanh(evaluate(*n.lhs, z));
    case Op::Tan: return std::tan(evaluate(*n.lhs, z));
    case Op::Log: {
      const Complex w = evaluate(*n.lhs, z);
      if (w == Complex{0.0, 0.0}) throw DomainError("log evaluated at 0");
      return std::log(w);
    }
  }
  return {};
}

/// d/dz of the tree, by the usual rules. The result is unreduced apart from
/// the trivial folds above.
inline NodePtr differentiate(const NodePtr& n) {
  const auto& u = n->lhs;
  switch (n->op) {
    case Op::Constant: return constant(0.0);
    case Op::Variable: return constant(1.0);
    case Op::Add: return add(differentiate(n->lhs), differentiate(n->rhs));
    case Op::Sub: return sub(differentiate(n->lhs), differentiate(n->rhs));
    case Op::Mul:
      return add(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs)));
    case Op::Div:
      return div(sub(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs))),
                 pow(n->rhs, 2));
    case Op::Neg: return neg(differentiate(u));
    case Op::Pow:
      return mul(mul(constant(static_cast<double>(n->power)), pow(u, n->power - 1)),
                 differentiate(u));
    case Op::Cosh: return mul(unary(Op::Sinh, u), differentiate(u));
    case Op::Sinh: return mul(unary(Op::Cosh, u), differentiate(u));
    case Op::Cos: return mul(neg(unary(Op::Sin, u)), differentiate(u));
    case Op::Sin: return mul(unary(Op::Cos, u), differentiate(u));
    case Op::Exp: return mul(unary(Op::Exp, u), differentiate(u));
    case Op::Tanh:
      return mul(sub(constant(1.0), pow(unary(Op::Tanh, u), 2)), differentiate(u));
    case Op::Tan:
      return mul(add(constant(1.0), pow(unary(Op::Tan, u), 2)), differentiate(u));
    case Op::Log: return div(differentiate(u), u);
  }
  return constant(0.0);
}

inline std::string format_real(double v) {
  // %.17g round-trips every double exactly.
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_constant(Complex v) {
  if (v == Complex{0.0, 1.0}) return "i";
  if (v.imag() == 0.0) {
    const std::string r = format_real(v.real());
    return v.real() < 0.0 || std::signbit(v.real()) ? "(" + r + ")" : r;
  }
  return "(" + format_real(v.real()) + " + " + format_real(v.imag()) + "*i)";
}

/// Fully parenthesized text that parses back to an equivalent tree.
inline std::string to_string(const Node& n) {
  switch (n.op) {
    case Op::Constant: return format_constant(n.value);
    case Op::Variable: return "z";
    case Op::Add: return "(" + to_string(*n.lhs) + " + " + to_string(*n.rhs) + ")";
    case Op::Sub: return "(" + to_string(*n.lhs) + " - " + to_string(*n.rhs) + ")";
    case Op::Mul: return "(" + to_string(*n.lhs) + " * " + to_string(*n.rhs) + ")";
    case Op::Div: return "(" + to_string(*n.lhs) + " / " + to_string(*n.rhs) + ")";
    case Op::Neg: return "(-" + to_string(*n.lhs) + ")";
    case Op::Pow: return "(" + to_string(*n.lhs) + ")^" + std::to_string(n.power);
    default: return std::string(function_name(n.op)) + "(" + to_string(*n.lhs) + ")";
  }
}

inline bool contains(const Node& n, Op op) {
  if (n.op == op) return true;
  return (n.lhs && contains(*n.lhs, op)) || (n.rhs && contains(*n.rhs, op));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == text_.size()) fail("empty expression");
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      skip_space();
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = binary(Op::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    std::size_t end = start;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    const bool fractional =
        end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E');
    if (end == start || fractional) {
      throw ParseError(ParseError::Kind::NonIntegerExponent, start,
                       "exponent must be a nonnegative integer literal");
    }
    unsigned k = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, k);
    if (ec != std::errc{}) {
      throw ParseError(ParseError::Kind::NonIntegerExponent, start, "exponent out of range");
    }
    pos_ = end;
    return power(base, k);
  }

  NodePtr parse_unary() {
    if (accept('-')) return unary(Op::Neg, parse_atom());
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    auto digits = [&] {
      const std::size_t s = p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      return p - s;
    };
    std::size_t mantissa = digits();
    if (p < text_.size() && text_[p] == '.') {
      ++p;
      mantissa += digits();
    }
    if (mantissa == 0) fail("malformed number");
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      const std::size_t exp_start = q;
      while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
      if (q == exp_start) {
        pos_ = q;
        fail("malformed exponent");
      }
      p = q;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + p, v);
    if (ec != std::errc{} || ptr != text_.data() + p) {
      pos_ = start;
      fail("malformed number");
    }
    pos_ = p;
    return constant(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "z") return variable();
    if (name == "i") return constant({0.0, 1.0});
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);
    if (const auto op = function_op(name)) {
      expect('(');
      NodePtr arg = parse_expr();
      expect(')');
      return unary(*op, arg);
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                     "'" + std::string(name) + "' is not a known name");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace expr

/// An immutable holomorphic right-hand side f together with the symbolic trees
/// of f' and f''.
class HolomorphicFunction {
 public:
  /// Parses `text`. Throws ParseError.
  static HolomorphicFunction parse(std::string_view text) {
    return HolomorphicFunction(expr::Parser(text).parse(), std::string(text));
  }

  HolomorphicFunction(NodePtr root, std::string source)
      : source_(std::move(source)),
        f_(std::move(root)),
        df_(expr::differentiate(f_)),
        d2f_(expr::differentiate(df_)) {}

  /// f(z) on principal branches. Throws DomainError (log at 0) or
  /// OverflowError (non-finite result).
  Complex operator()(Complex z) const { return checked(*f_, z); }
  Complex evaluate(Complex z) const { return checked(*f_, z); }
  Complex first_derivative(Complex z) const { return checked(*df_, z); }
  Complex second_derivative(Complex z) const { return checked(*d2f_, z); }

  /// Symbolic derivative of order 1 or 2 as a standalone function.
  HolomorphicFunction derivative(int order = 1) const {
    if (order == 1) return HolomorphicFunction(df_, expr::to_string(*df_));
    if (order == 2) return HolomorphicFunction(d2f_, expr::to_string(*d2f_));
    throw InvalidArgument("derivative order must be 1 or 2");
  }

  const std::string& source() const noexcept { return source_; }
  std::string to_string() const { return expr::to_string(*f_); }
  const NodePtr& tree() const noexcept { return f_; }

  /// log introduces the principal branch cut.
  bool has_branch_cut() const { return expr::contains(*f_, Op::Log); }
  /// False when the expression may have poles or a branch cut.
  bool is_entire() const {
    return !(expr::contains(*f_, Op::Log) || expr::contains(*f_, Op::Div) ||
             expr::contains(*f_, Op::Tan) || expr::contains(*f_, Op::Tanh));
  }

 private:
  static Complex checked(const Node& n, Complex z) {
    const Complex w = expr::evaluate(n, z);
    if (!is_finite(w)) throw OverflowError("non-finite value");
    return w;
  }

  std::string source_;
  NodePtr f_;
  NodePtr df_;
  NodePtr d2f_;
};

/// Acceleration of a solution of dz/dt = f(z): z'' = f'(z) f(z).
inline Complex second_time_derivative(const HolomorphicFunction& f, Complex z) {
  return f.first_derivative(z) * f(z);
}

/// (|u_x - v_y|, |u_y + v_x|) from central differences of step h.
inline std::pair<double, double> cauchy_riemann_residual(const HolomorphicFunction& f, Complex z,
                                                         double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const Complex dx = (f(z + Complex{h, 0.0}) - f(z - Complex{h, 0.0})) / (2.0 * h);
  const Complex dy = (f(z + Complex{0.0, h}) - f(z - Complex{0.0, h})) / (2.0 * h);
  const double ux = dx.real(), vx = dx.imag();
  const double uy = dy.real(), vy = dy.imag();
  return {std::abs(ux - vy), std::abs(uy + vx)};
}

}  // namespace sepkit
