#pragma once

// Shooting formulation of the curvature-minimizing boundary value problem:
//
//   minimize   |z''(t0)|^2 = |f'(z(t0)) f(z(t0))|^2
//   subject to dz/dt = f(z) on [t0, t1],  Re z(t1) = x*.
//
// The free variable is the initial point z(t0) = r + i s. For each s an inner
// Newton solve picks r so that the end constraint holds; the outer search
// minimizes the objective over s in a user-supplied bracket.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/optimize.hpp"
#include "sepkit/separatrix/candidate.hpp"

namespace sepkit {

struct BvpProblem {
  double x_star = 0.0;
  double t0 = 0.0;
  double t1 = 0.1;
  /// Search interval for Im z(t0).
  std::pair<double, double> bracket{-1.0, 1.0};

  double s_tol = 1e-9;            // outer bracket width
  double constraint_tol = 1e-12;  // |Re z(t1) - x*| relative to max(1, |x*|)
  int max_newton = 50;
  double fd_step = 1e-5;          // step of the optimality check
  IntegrationSettings settings{};

  void validate() const {
    if (!(t0 < t1)) throw InvalidArgument("t0 must be smaller than t1");
    if (!(bracket.first < bracket.second)) throw InvalidArgument("bracket must be non-degenerate");
    if (!std::isfinite(x_star)) throw InvalidArgument("x* must be finite");
  }
};

struct BvpShot {
  Complex z0{};  // z(t0)
  Complex z1{};  // z(t1)
  double objective = 0.0;
  int iterations = 0;
};

namespace detail {

class BvpShooter {
 public:
  BvpShooter(const HolomorphicFunction& f, const BvpProblem& p) : f_(f), p_(p) {}

  /// Solves Re z(t1; r + i s) = x* for r. Throws MethodError("InnerNewtonDiverged").
  BvpShot solve(double s) {
    double r = initial_guess(s);
    const double tol = p_.constraint_tol * std::max(1.0, std::abs(p_.x_star));
    FlowMapResult fm;
    try {
      fm = shoot(r, s);
    } catch (const Error&) {
      throw MethodError("InnerNewtonDiverged", "initial shot left the domain of f");
    }
    for (int it = 0; it <= p_.max_newton; ++it) {
      const double defect = fm.z.real() - p_.x_star;
      if (std::abs(defect) < tol) {
        solved_[s] = r;
        return {Complex{r, s}, fm.z, objective(Complex{r, s}), it};
      }
      const double slope = fm.sensitivity.real();
      if (slope == 0.0 || !std::isfinite(slope)) break;
      double step = -defect / slope;
      bool moved = false;
      for (int halving = 0; halving < 40; ++halving) {
        try {
          const FlowMapResult trial = shoot(r + step, s);
          if (std::abs(trial.z.real() - p_.x_star) < std::abs(defect)) {
            r += step;
            fm = trial;
            moved = true;
            break;
          }
        } catch (const Error&) {
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    throw MethodError("InnerNewtonDiverged",
                      "no initial real part satisfies the end constraint for Im z(t0) = " +
                          std::to_string(s));
  }

  double objective(Complex z0) const {
    return std::norm(second_time_derivative(f_, z0));
  }

 private:
  FlowMapResult shoot(double r, double s) const {
    return flow_map(f_, Complex{r, s}, TimeDirection::real_time(), p_.t1 - p_.t0, p_.settings);
  }

  double initial_guess(double s) const {
    if (!solved_.empty()) {
      auto it = solved_.lower_bound(s);
      if (it == solved_.end()) return std::prev(it)->second;
      if (it == solved_.begin()) return it->second;
      auto before = std::prev(it);
      return (s - before->first < it->first - s) ? before->second : it->second;
    }
    try {
      return advance(f_, Complex{p_.x_star, s}, TimeDirection::reversed_real_time(),
                     p_.t1 - p_.t0, p_.settings)
          .real();
    } catch (const Error&) {
      return p_.x_star;
    }
  }

  const HolomorphicFunction& f_;
  const BvpProblem& p_;
  std::map<double, double> solved_;
};

}  // namespace detail

/// Separatrix point z(t1) of the boundary value problem. Throws
/// MethodError("InnerNewtonDiverged") when no feasible shot exists at the
/// optimum and MethodError("BracketInvalid") when the minimum sits on the
/// bracket boundary.
inline SeparatrixCandidate bvp_separatrix_point(const HolomorphicFunction& f,
                                                const BvpProblem& p) {
  p.validate();
  detail::BvpShooter shooter(f, p);
  const double inf = std::numeric_limits<double>::infinity();

  auto J = [&](double s) {
    try {
      return shooter.solve(s).objective;
    } catch (const Error&) {
      return inf;
    }
  };

  auto [lo, hi] = p.bracket;
  optimize::ScalarMinimum m = optimize::golden_section(J, lo, hi, p.s_tol);
  if (!std::isfinite(m.value)) {
    throw MethodError("InnerNewtonDiverged", "end constraint infeasible across the bracket");
  }
  m = optimize::parabolic_refine(J, m, 10.0 * p.s_tol);

  const double edge = 4.0 * p.s_tol + 1e-12 * (hi - lo);
  if (m.x - lo < edge || hi - m.x < edge) {
    throw MethodError("BracketInvalid",
                      "objective minimum lies on the bracket boundary; split the bracket");
  }

  const BvpShot best = shooter.solve(m.x);
  const double h = p.fd_step;
  const double gradient = (J(m.x + h) - J(m.x - h)) / (2.0 * h);

  SeparatrixCandidate c;
  c.method = SeparatrixMethod::Bvp;
  c.z = best.z1;
  c.residual = std::abs(best.z1.real() - p.x_star);
  c.diagnostics["objective"] = best.objective;
  c.diagnostics["objective_gradient_fd"] = gradient;
  c.diagnostics["z_t0_re"] = best.z0.real();
  c.diagnostics["z_t0_im"] = best.z0.imag();
  c.diagnostics["x_star"] = p.x_star;
  c.diagnostics["t0"] = p.t0;
  c.diagnostics["t1"] = p.t1;
  c.diagnostics["outer_evaluations"] = m.evaluations;
  c.converged = c.residual < p.constraint_tol * std::max(1.0, std::abs(p.x_star)) &&
                std::isfinite(gradient);
  return c;
}

}  // namespace sepkit
