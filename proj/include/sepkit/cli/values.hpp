#pragma once

// Parsers for numeric command-line values. Real numbers are constant
// expressions, so "pi", "1.5pi", "-1.5*pi" and "pi/2" are all accepted.

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"

namespace sepkit::cli {

class UsageError : public Error {
 public:
  using Error::Error;
};

inline double parse_real(std::string_view text) {
  // "1.5pi" -> "1.5*pi": the expression grammar has no implicit products.
  std::string src;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    const bool starts_pi = text.substr(k, 2) == "pi";
    if (starts_pi && !src.empty() &&
        (std::isdigit(static_cast<unsigned char>(src.back())) || src.back() == '.')) {
      src += '*';
    }
    src += c;
  }
  const std::string shown(text);
  NodePtr tree;
  try {
    tree = expr::Parser(src).parse();
  } catch (const ParseError& e) {
    throw UsageError("not a number: '" + shown + "' (" + e.what() + ")");
  }
  if (expr::contains(*tree, Op::Variable)) {
    throw UsageError("not a number: '" + shown + "' depends on z");
  }
  const Complex v = expr::evaluate(*tree, Complex{});
  if (v.imag() != 0.0 || !std::isfinite(v.real())) {
    throw UsageError("not a finite real number: '" + shown + "'");
  }
  return v.real();
}

/// Comma-separated reals; `expected` = 0 accepts any non-empty count.
inline std::vector<double> parse_reals(const std::string& text, std::size_t expected = 0) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? comma : comma - start);
    out.push_back(parse_real(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (expected != 0 && out.size() != expected) {
    throw UsageError("expected " + std::to_string(expected) + " comma-separated values in '" +
                     text + "'");
  }
  return out;
}

/// "x_min,x_max,y_min,y_max".
inline Rect parse_domain(const std::string& text) {
  const auto v = parse_reals(text, 4);
  const Rect r{v[0], v[1], v[2], v[3]};
  if (!r.valid()) throw UsageError("domain '" + text + "' is degenerate");
  return r;
}

/// "re,im".
inline Complex parse_point(const std::string& text) {
  const auto v = parse_reals(text, 2);
  return {v[0], v[1]};
}

/// "re0,im0,re1,im1".
inline std::pair<Complex, Complex> parse_segment(const std::string& text) {
  const auto v = parse_reals(text, 4);
  return {Complex{v[0], v[1]}, Complex{v[2], v[3]}};
}

}  // namespace sepkit::cli
