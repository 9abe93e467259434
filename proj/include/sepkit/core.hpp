#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sepkit {

/// A point of the phase plane, z = x + iy.
using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double diagonal() const noexcept { return std::hypot(width(), height()); }
  bool valid() const noexcept {
    return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
           std::isfinite(y_max) && x_min < x_max && y_min < y_max;
  }
  bool contains(Complex z) const noexcept {
    return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min && z.imag() <= y_max;
  }
  /// True when z is inside with at least `margin` clearance from every edge.
  bool contains_strictly(Complex z, double margin) const noexcept {
    return z.real() > x_min + margin && z.real() < x_max - margin &&
           z.imag() > y_min + margin && z.imag() < y_max - margin;
  }
};

// Error hierarchy. Every failure the library reports derives from sepkit::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, NonIntegerExponent };

  ParseError(Kind kind, std::size_t position, const std::string& message)
      : Error(describe(kind) + " at position " + std::to_string(position) + ": " + message),
        kind_(kind),
        position_(position) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  static std::string describe(Kind kind) {
    switch (kind) {
      case Kind::Syntax: return "syntax error";
      case Kind::UnknownIdentifier: return "unknown identifier";
      case Kind::NonIntegerExponent: return "non-integer exponent";
    }
    return "parse error";
  }

  Kind kind_;
  std::size_t position_;
};

/// Evaluation left the domain of a function (log at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation produced a non-finite value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical method could not produce a result; `code` names the failure mode
/// (for example "NoBracket", "EmptyContour", "InnerNewtonDiverged").
class MethodError : public Error {
 public:
  MethodError(std::string code, const std::string& message)
      : Error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace sepkit
