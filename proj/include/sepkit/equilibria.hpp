#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"

namespace sepkit {

/// Type of a simple zero z0 of f, read off from f'(z0). Orientation is the
/// sign of Im f'(z0) (+1 counterclockwise); stability refers to Re f'(z0) < 0.
struct EquilibriumKind {
  enum class Type { Node, Center, Focus, Degenerate };

  Type type = Type::Degenerate;
  bool stable = false;   // Node, Focus
  int orientation = 0;   // Center, Focus

  static EquilibriumKind node(bool stable) { return {Type::Node, stable, 0}; }
  static EquilibriumKind center(int orientation) { return {Type::Center, false, orientation}; }
  static EquilibriumKind focus(bool stable, int orientation) {
    return {Type::Focus, stable, orientation};
  }
  static EquilibriumKind degenerate() { return {}; }

  bool operator==(const EquilibriumKind&) const = default;
};

inline std::string to_string(EquilibriumKind::Type t) {
  switch (t) {
    case EquilibriumKind::Type::Node: return "node";
    case EquilibriumKind::Type::Center: return "center";
    case EquilibriumKind::Type::Focus: return "focus";
    case EquilibriumKind::Type::Degenerate: return "degenerate";
  }
  return "unknown";
}

struct Equilibrium {
  Complex z0{};
  Complex f_prime{};
  EquilibriumKind kind;
  double residual = 0.0;  // |f(z0)|
};

inline constexpr double default_tol_class = 1e-9;

/// Real f' gives a node, imaginary f' a center, anything else a focus; the
/// "real"/"imaginary" tests use a band of tol_class relative to |f'|.
inline EquilibriumKind classify(Complex f_prime, double tol_class = default_tol_class) {
  const double a = f_prime.real();
  const double b = f_prime.imag();
  const double m = std::abs(f_prime);
  if (m < tol_class) return EquilibriumKind::degenerate();
  const int orientation = b > 0.0 ? 1 : -1;
  if (std::abs(b) <= tol_class * m) return EquilibriumKind::node(a < 0.0);
  if (std::abs(a) <= tol_class * m) return EquilibriumKind::center(orientation);
  return EquilibriumKind::focus(a < 0.0, orientation);
}

/// Type of the same zero for the flow dz/dt = e^{i theta} f(z).
inline EquilibriumKind classify_under_rotation(Complex f_prime, double theta,
                                               double tol_class = default_tol_class) {
  return classify(TimeDirection(theta).factor() * f_prime, tol_class);
}

struct ZeroSearchOptions {
  double zero_tol = 1e-10;
  double tol_class = default_tol_class;
  /// Roots closer than merge_rel * domain diagonal are merged.
  double merge_rel = 1e-8;
  int max_iterations = 100;
};

/// Newton iteration z <- z - f(z)/f'(z). Returns the limit when it converges
/// to |f| < zero_tol with a settled step.
inline std::optional<Complex> newton_polish(const HolomorphicFunction& f, Complex z,
                                            double zero_tol, int max_iterations = 100) {
  try {
    for (int it = 0; it < max_iterations; ++it) {
      const Complex fz = f(z);
      if (fz == Complex{0.0, 0.0}) return z;
      const Complex dfz = f.first_derivative(z);
      if (dfz == Complex{0.0, 0.0}) return std::nullopt;
      const Complex step = fz / dfz;
      z -= step;
      if (!is_finite(z)) return std::nullopt;
      if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) {
        if (std::abs(f(z)) < zero_tol) return z;
        return std::nullopt;
      }
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

/// Zeros of f inside `domain` (strict interior), from Newton runs seeded on a
/// grid_n x grid_n lattice, deduplicated and sorted by (re, im).
inline std::vector<Equilibrium> find_zeros(const HolomorphicFunction& f, const Rect& domain,
                                           int grid_n, const ZeroSearchOptions& opt = {}) {
  if (grid_n < 2) throw InvalidArgument("grid_n must be at least 2");
  if (!domain.valid()) throw InvalidArgument("domain must be a non-degenerate rectangle");
  const double merge_tol = opt.merge_rel * domain.diagonal();

  std::vector<Complex> roots;
  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      const Complex seed{domain.x_min + domain.width() * i / (grid_n - 1),
                         domain.y_min + domain.height() * j / (grid_n - 1)};
      const auto root = newton_polish(f, seed, opt.zero_tol, opt.max_iterations);
      if (root && domain.contains_strictly(*root, merge_tol)) roots.push_back(*root);
    }
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<Equilibrium> out;
  for (const Complex r : roots) {
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return std::abs(e.z0 - r) <= merge_tol;
    });
    if (duplicate) continue;
    Equilibrium e;
    e.z0 = r;
    e.f_prime = f.first_derivative(r);
    e.residual = std::abs(f(r));
    e.kind = std::abs(e.f_prime) < opt.zero_tol ? EquilibriumKind::degenerate()
                                                : classify(e.f_prime, opt.tol_class);
    out.push_back(e);
  }
  return out;
}

inline std::vector<Equilibrium> find_zeros(const HolomorphicFunction& f, const Rect& domain,
                                           int grid_n, double zero_tol) {
  ZeroSearchOptions opt;
  opt.zero_tol = zero_tol;
  return find_zeros(f, domain, grid_n, opt);
}

}  // namespace sepkit
