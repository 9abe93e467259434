#pragma once

// Adaptive integration of dz/dt = e^{i theta} f(z) in rotated complex time,
// with finite-escape detection and Poincare-section closure detection.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/dormand_prince.hpp"
#include "sepkit/expression.hpp"

namespace sepkit {

/// Direction of time in the complex t-plane: t = tau * e^{i theta}, tau >= 0.
/// theta = 0 is real time, pi/2 imaginary time, pi reversed real time.
class TimeDirection {
 public:
  TimeDirection() = default;
  explicit TimeDirection(double theta) : theta_(normalize(theta)) {}

  static TimeDirection real_time() { return TimeDirection(0.0); }
  static TimeDirection imaginary_time() { return TimeDirection(pi / 2.0); }
  static TimeDirection reversed_real_time() { return TimeDirection(pi); }

  double theta() const noexcept { return theta_; }

  /// e^{i theta}, exact at multiples of pi/2.
  Complex factor() const noexcept {
    const double quarter = theta_ / (pi / 2.0);
    const double k = std::round(quarter);
    if (std::abs(quarter - k) < 1e-15) {
      switch (static_cast<int>(k) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        case 3: return {0.0, -1.0};
      }
    }
    return std::polar(1.0, theta_);
  }

  /// The same time line traversed backwards.
  TimeDirection opposite() const { return TimeDirection(theta_ + pi); }

 private:
  static double normalize(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return t;
  }

  double theta_ = 0.0;
};

struct IntegrationSettings {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double r_blowup = 1e6;
  double t_max = 200.0;
  long max_steps = 1'000'000;
  /// Closure tolerance relative to max(1, |z0|).
  double closure_tol = 1e-8;

  void validate() const {
    if (!(rtol > 0.0 && atol > 0.0 && h_init > 0.0 && h_min > 0.0 && r_blowup > 0.0 &&
          t_max > 0.0 && max_steps > 0 && closure_tol > 0.0)) {
      throw InvalidArgument("integration settings must be positive");
    }
    if (!(h_min < h_init)) throw InvalidArgument("h_min must be smaller than h_init");
  }
};

enum class Termination { MaxTime, BlowUp, ClosedOrbit, StepUnderflow, GuardExit };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::MaxTime: return "max_time";
    case Termination::BlowUp: return "blowup";
    case Termination::ClosedOrbit: return "closed_orbit";
    case Termination::StepUnderflow: return "step_underflow";
    case Termination::GuardExit: return "guard_exit";
  }
  return "unknown";
}

struct Sample {
  double t = 0.0;
  Complex z{};
};

/// Optional event monitors for integrate().
struct Monitor {
  bool detect_closure = true;
  /// Winding reference for closure: angle of z - center when set, otherwise the
  /// angle of the velocity vector.
  std::optional<Complex> closure_center;
  /// GuardExit when |z - guard_center| exceeds guard_radius.
  std::optional<double> guard_radius;
  Complex guard_center{};
  /// GuardExit when z leaves this box.
  std::optional<Rect> bounds;
};

struct Trajectory {
  TimeDirection direction;
  std::vector<Sample> samples;
  Termination termination = Termination::MaxTime;
  /// Escape-time estimate (BlowUp), period (ClosedOrbit), or the time at which
  /// integration stopped otherwise.
  double event_time = 0.0;

  // diagnostics
  double closure_residual = 0.0;
  double closure_tolerance = 0.0;
  double accumulated_angle = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  bool step_budget_exhausted = false;

  const Sample& back() const { return samples.back(); }
  Complex end() const { return samples.back().z; }
};

namespace detail {

inline dp5::State<1> rotated_rhs(const HolomorphicFunction& f, Complex rot, Complex z) {
  return {rot * f(z)};
}

/// Signed angle of b relative to a, in (-pi, pi].
inline double turn(Complex a, Complex b) { return std::arg(b * std::conj(a)); }

}  // namespace detail

/// Integrates dz/dt = e^{i theta} f(z) from z0 over t in [0, t_max].
///
/// Terminates with the first applicable verdict: BlowUp when |z| exceeds
/// r_blowup (the escape time is refined by bisection inside the last step),
/// GuardExit when a monitor region is left, ClosedOrbit when the orbit returns
/// through the normal section at z0 within closure tolerance after turning at
/// least 1.9 pi, StepUnderflow when the controller needs h < h_min, MaxTime
/// otherwise. Samples are recorded at every accepted step.
inline Trajectory integrate(const HolomorphicFunction& f, Complex z0, TimeDirection dir,
                            const IntegrationSettings& s, const Monitor& monitor = {}) {
  s.validate();
  if (!is_finite(z0)) throw InvalidArgument("initial point must be finite");

  const Complex rot = dir.factor();
  auto rhs = [&](const dp5::State<1>& y) { return detail::rotated_rhs(f, rot, y[0]); };

  Trajectory traj;
  traj.direction = dir;
  traj.samples.push_back({0.0, z0});
  traj.closure_tolerance = s.closure_tol * std::max(1.0, std::abs(z0));

  dp5::State<1> y{z0};
  dp5::State<1> k = rhs(y);
  const Complex v0 = k[0];

  if (v0 == Complex{0.0, 0.0}) {
    // z0 is an equilibrium: the solution is constant.
    traj.samples.push_back({s.t_max, z0});
    traj.termination = Termination::MaxTime;
    traj.event_time = s.t_max;
    return traj;
  }

  auto reference = [&](Complex z, Complex v) {
    return monitor.closure_center ? z - *monitor.closure_center : v;
  };
  auto section = [&](Complex z) { return (std::conj(v0) * (z - z0)).real(); };
  auto outside_guard = [&](Complex z) {
    if (monitor.guard_radius && std::abs(z - monitor.guard_center) > *monitor.guard_radius) {
      return true;
    }
    return monitor.bounds && !monitor.bounds->contains(z);
  };
  // Single fifth-order step of size tau from the last accepted state.
  auto partial = [&](const dp5::State<1>& from, const dp5::State<1>& k_from, double tau) {
    return dp5::step<1>(rhs, from, k_from, tau, s.rtol, s.atol).y[0];
  };

  // Per-step turning limit keeps samples dense in angle.
  constexpr double max_turn = pi / 4.0;
  const double closure_turn = 1.9 * pi;

  double t = 0.0;
  double h = std::min(s.h_init, s.t_max);
  Complex ref_dir = reference(z0, v0);

  for (;;) {
    if (traj.accepted_steps + traj.rejected_steps >= s.max_steps) {
      traj.termination = Termination::MaxTime;
      traj.step_budget_exhausted = true;
      traj.event_time = t;
      return traj;
    }
    const bool last = h >= s.t_max - t;
    if (last) h = s.t_max - t;

    const auto r = dp5::step<1>(rhs, y, k, h, s.rtol, s.atol);
    double dturn = 0.0;
    bool ok = r.finite && r.error <= 1.0;
    Complex new_ref{};
    if (ok) {
      new_ref = reference(r.y[0], r.k_end[0]);
      if (new_ref == Complex{0.0, 0.0}) {
        dturn = 0.0;
      } else {
        dturn = detail::turn(ref_dir, new_ref);
        if (std::abs(dturn) > max_turn) ok = false;
      }
    }

    if (!ok) {
      ++traj.rejected_steps;
      const double shrink = (r.finite && r.error > 1.0) ? dp5::step_factor(r.error) : 0.25;
      h *= std::min(shrink, 0.9);
      if (h < s.h_min) {
        traj.termination = Termination::StepUnderflow;
        traj.event_time = t;
        return traj;
      }
      continue;
    }

    ++traj.accepted_steps;
    const double t_old = t;
    const Complex z_old = y[0];
    const Complex z_new = r.y[0];
    t = last ? s.t_max : t + h;

    if (std::abs(z_new) > s.r_blowup) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t_old); ++it) {
        const double mid = 0.5 * (lo + hi);
        const Complex zm = partial(y, k, mid);
        if (!is_finite(zm) || std::abs(zm) > s.r_blowup) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      Complex z_hit = partial(y, k, hi);
      if (!is_finite(z_hit)) z_hit = z_new;
      traj.samples.push_back({t_old + hi, z_hit});
      traj.termination = Termination::BlowUp;
      traj.event_time = t_old + hi;
      return traj;
    }

    if (outside_guard(z_new)) {
      traj.samples.push_back({t, z_new});
      traj.termination = Termination::GuardExit;
      traj.event_time = t;
      return traj;
    }

    traj.accumulated_angle += dturn;
    ref_dir = new_ref;

    if (monitor.detect_closure && std::abs(traj.accumulated_angle) >= closure_turn) {
      const double g_old = section(z_old);
      const double g_new = section(z_new);
      if (g_old < 0.0 && g_new >= 0.0) {
        double lo = 0.0, hi = h;
        double glo = g_old;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t_old); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = section(partial(y, k, mid));
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const Complex z_close = partial(y, k, hi);
        const double miss = std::abs(z_close - z0);
        traj.closure_residual = miss;
        if (miss < traj.closure_tolerance) {
          traj.samples.push_back({t_old + hi, z_close});
          traj.termination = Termination::ClosedOrbit;
          traj.event_time = t_old + hi;
          return traj;
        }
      }
    }

    traj.samples.push_back({t, z_new});
    y = r.y;
    k = r.k_end;

    if (last) {
      traj.termination = Termination::MaxTime;
      traj.event_time = t;
      return traj;
    }
    h *= dp5::step_factor(r.error);
  }
}

/// Position reached after flowing for time tau along `dir` (no event monitors).
/// Throws MethodError("FlowFailed") if the flow does not exist up to tau.
inline Complex advance(const HolomorphicFunction& f, Complex z0, TimeDirection dir, double tau,
                       IntegrationSettings s = {}) {
  if (tau == 0.0) return z0;
  if (tau < 0.0) return advance(f, z0, dir.opposite(), -tau, s);
  s.t_max = tau;
  s.h_init = std::min(s.h_init, 0.5 * tau);
  s.h_min = std::min(s.h_min, 0.1 * s.h_init);
  Monitor m;
  m.detect_closure = false;
  const Trajectory tr = integrate(f, z0, dir, s, m);
  if (tr.termination != Termination::MaxTime || tr.step_budget_exhausted) {
    throw MethodError("FlowFailed", "flow ended with " + to_string(tr.termination) +
                                        " before reaching the requested time");
  }
  return tr.end();
}

/// Flow map z0 -> z(T) together with its complex derivative dz(T)/dz0, from the
/// variational equation Phi' = e^{i theta} f'(z) Phi.
struct FlowMapResult {
  Complex z{};
  Complex sensitivity{};
};

inline FlowMapResult flow_map(const HolomorphicFunction& f, Complex z0, TimeDirection dir,
                              double T, const IntegrationSettings& s = {}) {
  s.validate();
  if (!(T > 0.0)) throw InvalidArgument("flow horizon must be positive");
  const Complex rot = dir.factor();
  auto rhs = [&](const dp5::State<2>& y) -> dp5::State<2> {
    return {rot * f(y[0]), rot * f.first_derivative(y[0]) * y[1]};
  };
  dp5::State<2> y{z0, Complex{1.0, 0.0}};
  dp5::State<2> k = rhs(y);
  double t = 0.0;
  double h = std::min(s.h_init, T);
  long steps = 0;
  while (t < T) {
    if (++steps > s.max_steps) throw MethodError("FlowFailed", "step budget exhausted");
    const bool last = h >= T - t;
    if (last) h = T - t;
    const auto r = dp5::step<2>(rhs, y, k, h, s.rtol, s.atol);
    if (!(r.finite && r.error <= 1.0)) {
      h *= std::min(r.finite ? dp5::step_factor(r.error) : 0.25, 0.9);
      if (h < s.h_min) throw MethodError("FlowFailed", "step size underflow");
      continue;
    }
    if (std::abs(r.y[0]) > s.r_blowup) throw MethodError("FlowFailed", "solution blew up");
    y = r.y;
    k = r.k_end;
    t = last ? T : t + h;
    h *= dp5::step_factor(r.error);
  }
  return {y[0], y[1]};
}

/// Outcome of one integration run, without samples.
struct RunVerdict {
  Termination termination = Termination::MaxTime;
  double time = 0.0;
  Complex end{};
  long steps = 0;
};

inline RunVerdict summarize(const Trajectory& tr) {
  return {tr.termination, tr.event_time, tr.end(), tr.accepted_steps};
}

/// Forward/backward escape behaviour of the trajectory through z0. A forward
/// (backward) BlowUp marks a positive (negative) separatrix.
struct EscapeReport {
  RunVerdict forward;
  RunVerdict backward;
  bool is_positive_separatrix = false;
  bool is_negative_separatrix = false;

  bool is_separatrix() const { return is_positive_separatrix || is_negative_separatrix; }
};

inline EscapeReport escape_report(const HolomorphicFunction& f, Complex z0,
                                  const IntegrationSettings& s = {}) {
  EscapeReport rep;
  rep.forward = summarize(integrate(f, z0, TimeDirection::real_time(), s));
  rep.backward = summarize(integrate(f, z0, TimeDirection::reversed_real_time(), s));
  rep.is_positive_separatrix = rep.forward.termination == Termination::BlowUp;
  rep.is_negative_separatrix = rep.backward.termination == Termination::BlowUp;
  return rep;
}

}  // namespace sepkit
