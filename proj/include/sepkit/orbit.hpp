#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/winding.hpp"

namespace sepkit {

struct OrbitClassification {
  enum class Verdict { Periodic, Escaping, Indeterminate };

  Verdict verdict = Verdict::Indeterminate;
  double period = 0.0;  // Periodic only
  int index = 0;        // Periodic only: winding about the center, +1 or -1
  Complex center{};

  // diagnostics
  Termination termination = Termination::MaxTime;
  double closure_residual = 0.0;
  std::size_t samples_used = 0;
  std::string note;

  bool periodic() const { return verdict == Verdict::Periodic; }
};

inline std::string to_string(OrbitClassification::Verdict v) {
  switch (v) {
    case OrbitClassification::Verdict::Periodic: return "periodic";
    case OrbitClassification::Verdict::Escaping: return "escaping";
    case OrbitClassification::Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct OrbitOptions {
  /// Escaping once the orbit is farther than this from the center.
  std::optional<double> guard_radius;
  /// |f(center)| must be below this.
  double zero_tol = 1e-8;
};

/// Closed polygon through the samples of a ClosedOrbit trajectory. The final
/// sample duplicates the start up to the closure residual and is dropped.
inline ClosedCurve orbit_curve(const Trajectory& tr) {
  std::vector<Complex> pts;
  pts.reserve(tr.samples.size());
  for (const Sample& s : tr.samples) {
    if (pts.empty() || s.z != pts.back()) pts.push_back(s.z);
  }
  if (pts.size() > 3) pts.pop_back();
  return ClosedCurve(std::move(pts));
}

/// Integrates from z_start, detecting closure by the winding angle about
/// `center`, and reports the winding index of the closed orbit.
inline OrbitClassification orbit_index(const HolomorphicFunction& f, Complex z_start,
                                       Complex center, const IntegrationSettings& s = {},
                                       const OrbitOptions& opt = {}) {
  if (!(std::abs(f(center)) < opt.zero_tol)) {
    throw InvalidArgument("center is not an equilibrium");
  }
  if (z_start == center) throw InvalidArgument("start point coincides with the center");

  Monitor m;
  m.closure_center = center;
  if (opt.guard_radius) {
    m.guard_radius = opt.guard_radius;
    m.guard_center = center;
  }
  const Trajectory tr = integrate(f, z_start, TimeDirection::real_time(), s, m);

  OrbitClassification out;
  out.center = center;
  out.termination = tr.termination;
  out.closure_residual = tr.closure_residual;
  out.samples_used = tr.samples.size();

  switch (tr.termination) {
    case Termination::BlowUp:
    case Termination::GuardExit:
      out.verdict = OrbitClassification::Verdict::Escaping;
      return out;
    case Termination::MaxTime:
    case Termination::StepUnderflow:
      out.verdict = OrbitClassification::Verdict::Indeterminate;
      out.note = "no closure: " + to_string(tr.termination);
      return out;
    case Termination::ClosedOrbit: break;
  }

  try {
    const int index = winding_number(orbit_curve(tr), center);
    if (index == 1 || index == -1) {
      out.verdict = OrbitClassification::Verdict::Periodic;
      out.index = index;
      out.period = tr.event_time;
    } else {
      out.verdict = OrbitClassification::Verdict::Indeterminate;
      out.note = "closed orbit with winding " + std::to_string(index);
    }
  } catch (const Error& e) {
    out.verdict = OrbitClassification::Verdict::Indeterminate;
    out.note = e.what();
  }
  return out;
}

/// Periodic-or-not verdict for the orbit through z0 around `center`.
inline OrbitClassification classify_orbit(const HolomorphicFunction& f, Complex z0,
                                          Complex center, const IntegrationSettings& s = {},
                                          const OrbitOptions& opt = {}) {
  return orbit_index(f, z0, center, s, opt);
}

/// Orbit through z, closed by tangent turning, assigned to whichever of
/// `centers` it winds around.
struct EnclosedOrbit {
  bool periodic = false;
  int center_slot = -1;  // index into the centers span
  int index = 0;
  double period = 0.0;
  Termination termination = Termination::MaxTime;
  std::string note;
};

inline EnclosedOrbit enclosing_orbit(const HolomorphicFunction& f, Complex z,
                                     std::span<const Complex> centers,
                                     const IntegrationSettings& s = {}) {
  EnclosedOrbit out;
  Trajectory tr;
  try {
    tr = integrate(f, z, TimeDirection::real_time(), s);
  } catch (const Error& e) {
    out.note = e.what();
    return out;
  }
  out.termination = tr.termination;
  if (tr.termination != Termination::ClosedOrbit) {
    out.note = "no closure: " + to_string(tr.termination);
    return out;
  }
  try {
    const ClosedCurve curve = orbit_curve(tr);
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const int w = winding_number(curve, centers[c]);
      if (w == 0) continue;
      if (out.center_slot >= 0) {
        out.note = "orbit encloses more than one center";
        out.center_slot = -1;
        return out;
      }
      out.center_slot = static_cast<int>(c);
      out.index = w;
    }
  } catch (const Error& e) {
    out.note = e.what();
    out.center_slot = -1;
    return out;
  }
  if (out.center_slot < 0) {
    out.note = "orbit encloses none of the centers";
    return out;
  }
  if (out.index != 1 && out.index != -1) {
    out.note = "winding index " + std::to_string(out.index);
    return out;
  }
  out.periodic = true;
  out.period = tr.event_time;
  return out;
}

}  // namespace sepkit
