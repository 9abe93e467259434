#pragma once

// Single steps of the Dormand-Prince 5(4) embedded pair on complex state
// vectors. The propagated solution is the fifth-order one; the difference to
// the embedded fourth-order solution drives step-size control.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>

#include "sepkit/core.hpp"

namespace sepkit::dp5 {

template <std::size_t N>
using State = std::array<Complex, N>;

namespace coef {
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
}  // namespace coef

template <std::size_t N>
struct StepResult {
  State<N> y;
  State<N> k_end;  // derivative at the new state (first stage of the next step)
  double error = std::numeric_limits<double>::infinity();
  bool finite = false;
};

template <std::size_t N>
inline State<N> combine(const State<N>& y, double h,
                        std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [w, k] : terms) {
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += (h * w) * (*k)[i];
  }
  return out;
}

/// One Dormand-Prince step of size h from y with y' = rhs(y), given k1 = rhs(y).
/// Evaluation failures of rhs (DomainError, OverflowError) and non-finite
/// stages produce a result with finite == false and infinite error.
template <std::size_t N, class Rhs>
StepResult<N> step(const Rhs& rhs, const State<N>& y, const State<N>& k1, double h, double rtol,
                   double atol) {
  using namespace coef;
  StepResult<N> r;
  try {
    const State<N> k2 = rhs(combine<N>(y, h, {{a21, &k1}}));
    const State<N> k3 = rhs(combine<N>(y, h, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = rhs(combine<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 = rhs(combine<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 =
        rhs(combine<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    r.y = combine<N>(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    for (const Complex& c : r.y) {
      if (!is_finite(c)) return r;
    }
    r.k_end = rhs(r.y);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const Complex err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * r.k_end[i]);
      const double sre =
          atol + rtol * std::max(std::abs(y[i].real()), std::abs(r.y[i].real()));
      const double sim =
          atol + rtol * std::max(std::abs(y[i].imag()), std::abs(r.y[i].imag()));
      sum += (err.real() / sre) * (err.real() / sre) + (err.imag() / sim) * (err.imag() / sim);
    }
    r.error = std::sqrt(sum / static_cast<double>(2 * N));
    r.finite = std::isfinite(r.error);
    if (!r.finite) r.error = std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
  } catch (const OverflowError&) {
  }
  return r;
}

/// Step-size factor from an error norm, clamped to [0.2, 5].
inline double step_factor(double error) {
  if (!(error > 0.0)) return 5.0;
  if (!std::isfinite(error)) return 0.2;
  return std::min(5.0, std::max(0.2, 0.9 * std::pow(error, -0.2)));
}

}  // namespace sepkit::dp5
