#pragma once

// Separatrix localization between two period regions: a point lies on their
// common boundary when orbits started on either side of it wind around their
// respective centers with opposite orientation (index product -1).

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/equilibria.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/orbit.hpp"
#include "sepkit/separatrix/candidate.hpp"

namespace sepkit {

using CenterPair = std::pair<Equilibrium, Equilibrium>;

struct IndexProbe {
  Complex z_star{};
  double epsilon = 0.0;
  Complex probe_0{};
  Complex probe_1{};
  /// Product of the two orbit indices; empty when either orbit is not a
  /// periodic orbit around one of the centers.
  std::optional<int> result;

  EnclosedOrbit orbit_0;
  EnclosedOrbit orbit_1;

  bool indeterminate() const { return !result.has_value(); }
};

namespace detail {

inline void require_centers(const CenterPair& centers) {
  if (centers.first.kind.type != EquilibriumKind::Type::Center ||
      centers.second.kind.type != EquilibriumKind::Type::Center) {
    throw InvalidArgument("index test needs two center equilibria");
  }
}

inline std::array<Complex, 2> center_points(const CenterPair& centers) {
  return {centers.first.z0, centers.second.z0};
}

}  // namespace detail

/// Probes z_star +- epsilon * normal and multiplies the winding indices of the
/// two orbits about the centers they enclose.
inline IndexProbe index_product_test(const HolomorphicFunction& f, Complex z_star,
                                     Complex normal, double epsilon, const CenterPair& centers,
                                     const IntegrationSettings& s = {}) {
  detail::require_centers(centers);
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (std::abs(std::abs(normal) - 1.0) > 1e-9) throw InvalidArgument("normal must be a unit vector");

  const auto pts = detail::center_points(centers);
  IndexProbe probe;
  probe.z_star = z_star;
  probe.epsilon = epsilon;
  probe.probe_0 = z_star + epsilon * normal;
  probe.probe_1 = z_star - epsilon * normal;
  probe.orbit_0 = enclosing_orbit(f, probe.probe_0, pts, s);
  probe.orbit_1 = enclosing_orbit(f, probe.probe_1, pts, s);
  if (probe.orbit_0.periodic && probe.orbit_1.periodic) {
    probe.result = probe.orbit_0.index * probe.orbit_1.index;
  }
  return probe;
}

struct IndexScanOptions {
  /// Number of intervals the segment is divided into before bisection.
  int intervals = 17;
  int max_bisections = 200;
};

/// Walks the segment, brackets every change of orbit index between
/// neighbouring samples and bisects it below bisect_tol. Each candidate is
/// re-checked with index_product_test along the segment direction (retrying
/// once with epsilon/2 when indeterminate). Throws MethodError("NoBracket")
/// when no index change is found.
inline std::vector<SeparatrixCandidate> index_scan(const HolomorphicFunction& f,
                                                   std::pair<Complex, Complex> segment,
                                                   const CenterPair& centers, double epsilon,
                                                   const IntegrationSettings& s,
                                                   double bisect_tol,
                                                   const IndexScanOptions& opt = {}) {
  detail::require_centers(centers);
  if (!(bisect_tol > 0.0)) throw InvalidArgument("bisect_tol must be positive");
  if (opt.intervals < 1) throw InvalidArgument("scan needs at least one interval");
  const auto [a, b] = segment;
  const double length = std::abs(b - a);
  if (!(length > 0.0)) throw InvalidArgument("segment is degenerate");
  const Complex direction = (b - a) / length;
  const auto pts = detail::center_points(centers);

  auto at = [&](double u) { return a + u * (b - a); };
  // Orbit index at the parameter u, or 0 when not periodic around a center.
  auto index_at = [&](double u) {
    const EnclosedOrbit o = enclosing_orbit(f, at(u), pts, s);
    return o.periodic ? o.index : 0;
  };

  std::vector<std::pair<double, int>> samples;
  for (int k = 0; k <= opt.intervals; ++k) {
    const double u = static_cast<double>(k) / opt.intervals;
    samples.emplace_back(u, index_at(u));
  }

  std::vector<SeparatrixCandidate> out;
  std::optional<std::pair<double, int>> previous;
  for (const auto& sample : samples) {
    if (sample.second == 0) continue;
    if (previous && previous->second != sample.second) {
      double lo = previous->first, hi = sample.first;
      const int index_lo = previous->second;
      const int index_hi = sample.second;
      int steps = 0;
      bool stalled = false;
      while ((hi - lo) * length >= bisect_tol && steps < opt.max_bisections) {
        ++steps;
        const double w = hi - lo;
        int moved = 0;
        for (const double u : {lo + 0.5 * w, lo + 0.75 * w, lo + 0.25 * w}) {
          const int idx = index_at(u);
          if (idx == 0) continue;
          if (idx == index_lo) {
            lo = u;
          } else {
            hi = u;
          }
          moved = 1;
          break;
        }
        if (!moved) {
          stalled = true;
          break;
        }
      }

      SeparatrixCandidate c;
      c.method = SeparatrixMethod::IndexScan;
      c.z = at(0.5 * (lo + hi));
      c.residual = (hi - lo) * length;
      c.diagnostics["bracket_width"] = c.residual;
      c.diagnostics["bisection_steps"] = steps;
      c.diagnostics["index_before"] = index_lo;
      c.diagnostics["index_after"] = index_hi;

      double eps_used = epsilon;
      IndexProbe probe = index_product_test(f, c.z, direction, eps_used, centers, s);
      if (probe.indeterminate()) {
        eps_used = 0.5 * epsilon;
        probe = index_product_test(f, c.z, direction, eps_used, centers, s);
      }
      c.diagnostics["epsilon"] = eps_used;
      c.diagnostics["product"] = probe.result.value_or(0);
      c.converged = !stalled && c.residual < bisect_tol && probe.result == -1;
      out.push_back(std::move(c));
    }
    previous = sample;
  }

  if (out.empty()) {
    throw MethodError("NoBracket", "orbit index does not change along the segment");
  }
  return out;
}

}  // namespace sepkit
