#pragma once

#include <cmath>
#include <utility>

namespace sepkit::optimize {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of `fn` on [a, b] until the bracket is
/// narrower than `tol`.
template <class Fn>
ScalarMinimum golden_section(Fn&& fn, double a, double b, double tol, int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  int evals = 2;
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = fn(x2);
    }
    ++evals;
  }
  ScalarMinimum m;
  m.lo = a;
  m.hi = b;
  m.evaluations = evals;
  if (f1 <= f2) {
    m.x = x1;
    m.value = f1;
  } else {
    m.x = x2;
    m.value = f2;
  }
  return m;
}

/// Vertex of the parabola through (x0,f0), (x1,f1), (x2,f2); returns x1 when
/// the points are collinear.
inline double parabola_vertex(double x0, double f0, double x1, double f1, double x2, double f2) {
  const double num = (x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0);
  const double den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
  if (den == 0.0 || !std::isfinite(num / den)) return x1;
  return x1 - 0.5 * num / den;
}

/// A few successive parabolic-interpolation steps around a golden-section
/// result. Only improving steps inside [lo, hi] are accepted.
template <class Fn>
ScalarMinimum parabolic_refine(Fn&& fn, ScalarMinimum m, double h, int steps = 3) {
  for (int k = 0; k < steps && h > 0.0; ++k) {
    const double xl = m.x - h, xr = m.x + h;
    const double fl = fn(xl), fr = fn(xr);
    m.evaluations += 2;
    const double xv = parabola_vertex(xl, fl, m.x, m.value, xr, fr);
    if (xv > m.lo && xv < m.hi && xv != m.x) {
      const double fv = fn(xv);
      ++m.evaluations;
      if (fv < m.value) {
        m.x = xv;
        m.value = fv;
      }
    }
    h *= 0.1;
  }
  return m;
}

}  // namespace sepkit::optimize
