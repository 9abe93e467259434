#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sepkit/core.hpp"

namespace sepkit {

/// Polygon with an implicit closing edge from the last vertex to the first.
class ClosedCurve {
 public:
  explicit ClosedCurve(std::vector<Complex> points) : points_(std::move(points)) {
    if (points_.size() < 3) throw InvalidArgument("closed curve needs at least 3 points");
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (!is_finite(points_[k])) throw InvalidArgument("closed curve has a non-finite vertex");
      if (points_[k] == points_[(k + 1) % points_.size()]) {
        throw InvalidArgument("closed curve has repeated consecutive vertices");
      }
    }
  }

  std::span<const Complex> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  Complex operator[](std::size_t k) const { return points_[k]; }
  Complex edge(std::size_t k) const { return points_[(k + 1) % size()] - points_[k]; }

  /// Diagonal of the bounding box.
  double diameter() const {
    auto [xmin, xmax] = std::minmax_element(points_.begin(), points_.end(),
                                            [](Complex a, Complex b) { return a.real() < b.real(); });
    auto [ymin, ymax] = std::minmax_element(points_.begin(), points_.end(),
                                            [](Complex a, Complex b) { return a.imag() < b.imag(); });
    return std::hypot(xmax->real() - xmin->real(), ymax->imag() - ymin->imag());
  }

  ClosedCurve reversed() const {
    std::vector<Complex> r(points_.rbegin(), points_.rend());
    return ClosedCurve(std::move(r));
  }

 private:
  std::vector<Complex> points_;
};

namespace detail {

inline double distance_to_segment(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

/// Rounds turns to an integer, failing if the value is more than 0.1 away.
inline int round_turns(double turns) {
  const double k = std::round(turns);
  if (std::abs(turns - k) > 0.1) {
    throw MethodError("AmbiguousWinding", "angle sum is " + std::to_string(turns) +
                                              " turns, not close to an integer");
  }
  return static_cast<int>(k);
}

}  // namespace detail

inline constexpr double default_eps_on_curve = 1e-9;

/// Sum of the signed angles subtended at p by the edges, in turns. No rounding.
inline double winding_angle(const ClosedCurve& curve, Complex p) {
  double total = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const Complex a = curve[k] - p;
    const Complex b = curve[(k + 1) % curve.size()] - p;
    total += std::arg(b * std::conj(a));
  }
  return total / two_pi;
}

/// Winding number of the curve about p. Throws MethodError("PointOnCurve") when
/// p lies within eps_rel * diameter of the curve.
inline int winding_number(const ClosedCurve& curve, Complex p,
                          double eps_rel = default_eps_on_curve) {
  const double eps = eps_rel * curve.diameter();
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (detail::distance_to_segment(p, curve[k], curve[(k + 1) % curve.size()]) <= eps) {
      throw MethodError("PointOnCurve", "point lies on the curve");
    }
  }
  return detail::round_turns(winding_angle(curve, p));
}

/// Turning number: full rotations of the edge direction along the curve.
inline int tangent_winding(const ClosedCurve& curve) {
  double total = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    total += std::arg(curve.edge((k + 1) % curve.size()) * std::conj(curve.edge(k)));
  }
  return detail::round_turns(total / two_pi);
}

}  // namespace sepkit
