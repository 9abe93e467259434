#pragma once

// Separatrix approximation by maximal curvature of imaginary-time
// trajectories. Imaginary-time paths cross the real-time flow orthogonally;
// each of them bends most where it crosses a real-time separatrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/optimize.hpp"
#include "sepkit/separatrix/candidate.hpp"

namespace sepkit {

inline constexpr double default_zero_velocity_tol = 1e-14;

/// Signed curvature of the path of dz/dt = e^{i theta} f(z) through z:
/// Im(conj(v) a) / |v|^3 with v = e^{i theta} f and a = e^{2 i theta} f' f.
/// Throws MethodError("ZeroVelocity") when |f(z)| < tol.
inline double curvature_at(const HolomorphicFunction& f, Complex z, TimeDirection dir,
                           double tol = default_zero_velocity_tol) {
  const Complex fz = f(z);
  const double speed = std::abs(fz);
  if (speed < tol) throw MethodError("ZeroVelocity", "curvature is undefined at an equilibrium");
  const Complex rot = dir.factor();
  const Complex v = rot * fz;
  const Complex a = rot * rot * f.first_derivative(z) * fz;
  return (std::conj(v) * a).imag() / (speed * speed * speed);
}

struct CurvatureScanOptions {
  /// Samples with |f| below this fraction of |f(z0)| are skipped (the path is
  /// settling onto an equilibrium and the curvature formula loses precision).
  double equilibrium_cutoff = 1e-6;
  /// Minimum spread of |kappa| along the path; below it the path is flat.
  double flat_tol = 1e-12;
  /// Time tolerance of the golden-section refinement.
  double refine_tol = 1e-10;
  TimeDirection direction = TimeDirection::imaginary_time();
};

/// Maximizes |curvature| along the imaginary-time trajectory through z0
/// (followed in both time directions). residual = sample spacing at the
/// discrete maximum. Throws MethodError("FlatCurvature") when |kappa| is
/// constant along the path.
inline SeparatrixCandidate curvature_max_scan(const HolomorphicFunction& f, Complex z0,
                                              const IntegrationSettings& s = {},
                                              const CurvatureScanOptions& opt = {}) {
  const double speed0 = std::abs(f(z0));
  if (speed0 < default_zero_velocity_tol) {
    throw InvalidArgument("seed point is an equilibrium");
  }
  const TimeDirection dir = opt.direction;
  const Trajectory fwd = integrate(f, z0, dir, s);
  const Trajectory bwd = integrate(f, z0, dir.opposite(), s);

  // Combined path with signed times, increasing.
  std::vector<Sample> path;
  path.reserve(fwd.samples.size() + bwd.samples.size());
  for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it) {
    if (it->t == 0.0) continue;
    path.push_back({-it->t, it->z});
  }
  path.insert(path.end(), fwd.samples.begin(), fwd.samples.end());

  const double cutoff = opt.equilibrium_cutoff * speed0;
  auto abs_kappa = [&](Complex z) -> double {
    try {
      if (std::abs(f(z)) < cutoff) return -1.0;
      return std::abs(curvature_at(f, z, dir));
    } catch (const Error&) {
      return -1.0;
    }
  };

  std::size_t best = 0;
  double kmax = -1.0, kmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double kv = abs_kappa(path[k].z);
    if (kv < 0.0) continue;
    kmin = std::min(kmin, kv);
    if (kv > kmax) {
      kmax = kv;
      best = k;
    }
  }
  if (kmax < 0.0 || kmax - kmin < opt.flat_tol) {
    throw MethodError("FlatCurvature", "curvature does not vary along the imaginary-time path");
  }

  // Position at signed time t, re-integrated from the nearest sample on the
  // side of t = 0.
  auto position = [&](double t) {
    const Sample* base = nullptr;
    if (t >= 0.0) {
      auto it = std::upper_bound(path.begin(), path.end(), t,
                                 [](double v, const Sample& smp) { return v < smp.t; });
      base = &*std::prev(it);
    } else {
      auto it = std::lower_bound(path.begin(), path.end(), t,
                                 [](const Sample& smp, double v) { return smp.t < v; });
      base = &*it;
    }
    return advance(f, base->z, dir, t - base->t, s);
  };

  const std::size_t lo_k = best > 0 ? best - 1 : best;
  const std::size_t hi_k = best + 1 < path.size() ? best + 1 : best;
  const double t_lo = path[lo_k].t;
  const double t_hi = path[hi_k].t;

  Complex z_best = path[best].z;
  double k_best = kmax;
  double t_best = path[best].t;
  if (t_hi > t_lo) {
    auto neg_kappa = [&](double t) {
      try {
        return -abs_kappa(position(t));
      } catch (const Error&) {
        return 1.0;
      }
    };
    const optimize::ScalarMinimum m = optimize::golden_section(neg_kappa, t_lo, t_hi, opt.refine_tol);
    if (-m.value >= kmax) {
      t_best = m.x;
      z_best = position(m.x);
      k_best = -m.value;
    }
  }

  double spacing = 0.0;
  if (lo_k != best) spacing = std::max(spacing, std::abs(path[best].z - path[lo_k].z));
  if (hi_k != best) spacing = std::max(spacing, std::abs(path[hi_k].z - path[best].z));

  SeparatrixCandidate c;
  c.method = SeparatrixMethod::Curvature;
  c.z = z_best;
  c.residual = spacing;
  c.converged = true;
  c.diagnostics["curvature"] = k_best;
  c.diagnostics["time"] = t_best;
  c.diagnostics["samples"] = static_cast<double>(path.size());
  c.diagnostics["seed_re"] = z0.real();
  c.diagnostics["seed_im"] = z0.imag();
  return c;
}

}  // namespace sepkit
