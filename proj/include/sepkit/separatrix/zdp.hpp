#pragma once

// Order-1 zero-derivative principle with Im z as the variable: along
// solutions d/dt Im z = Im f(z), so the ZDP set is the zero contour of Im f.
// The contour is extracted by marching squares and every vertex is refined by
// Newton steps along the gradient.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sepkit/core.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/separatrix/candidate.hpp"

namespace sepkit {

enum class ZdpVariable {
  Imag,  // zero contour of Im f
  Real,  // mirrored variant: zero contour of Re f
};

struct ZdpOptions {
  ZdpVariable variable = ZdpVariable::Imag;
  int max_newton = 50;
};

struct ZdpPolyline {
  std::vector<Complex> points;
  std::vector<double> residuals;  // |g(z)| per point
  bool closed = false;
};

struct ZdpResult {
  Rect domain;
  int grid_n = 0;
  std::vector<ZdpPolyline> polylines;
  /// Cells (ix, iy) that contributed at least one refined vertex, sorted.
  std::vector<std::pair<int, int>> active_cells;
  std::size_t vertex_count = 0;
  std::size_t dropped_vertices = 0;

  std::vector<SeparatrixCandidate> candidates(double refine_tol) const {
    std::vector<SeparatrixCandidate> out;
    for (const auto& line : polylines) {
      for (std::size_t k = 0; k < line.points.size(); ++k) {
        SeparatrixCandidate c;
        c.z = line.points[k];
        c.method = SeparatrixMethod::Zdp;
        c.residual = line.residuals[k];
        c.converged = c.residual < refine_tol;
        out.push_back(std::move(c));
      }
    }
    return out;
  }
};

namespace detail {

struct ZdpField {
  const HolomorphicFunction& f;
  ZdpVariable variable;

  double value(Complex z) const {
    const Complex w = f(z);
    return variable == ZdpVariable::Imag ? w.imag() : w.real();
  }
  // (dg/dx, dg/dy) from f' by the Cauchy-Riemann relations.
  Complex gradient(Complex z) const {
    const Complex d = f.first_derivative(z);
    return variable == ZdpVariable::Imag ? Complex{d.imag(), d.real()}
                                         : Complex{d.real(), -d.imag()};
  }
};

}  // namespace detail

/// Zero contour of Im f (or Re f) on `domain` sampled by a grid_n x grid_n
/// cell lattice. Vertices are refined until |g| < refine_tol; vertices that
/// fail to converge within one cell diagonal are dropped. Throws
/// MethodError("EmptyContour") when g has no sign change on the grid.
inline ZdpResult zdp_curve(const HolomorphicFunction& f, const Rect& domain, int grid_n,
                           double refine_tol, const ZdpOptions& opt = {}) {
  if (grid_n < 8) throw InvalidArgument("grid_n must be at least 8");
  if (!domain.valid()) throw InvalidArgument("domain must be a non-degenerate rectangle");
  if (!(refine_tol > 0.0)) throw InvalidArgument("refine_tol must be positive");

  const detail::ZdpField field{f, opt.variable};
  const int n = grid_n;
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;
  auto node = [&](int i, int j) { return Complex{domain.x_min + i * dx, domain.y_min + j * dy}; };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> g((n + 1) * (n + 1));
  auto G = [&](int i, int j) -> double& { return g[j * (n + 1) + i]; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      try {
        G(i, j) = field.value(node(i, j));
      } catch (const Error&) {
        G(i, j) = nan;
      }
    }
  }

  // Edge numbering: horizontal edges (i,j)-(i+1,j) first, then vertical
  // edges (i,j)-(i,j+1).
  const int horizontal = n * (n + 1);
  const int edge_count = horizontal + (n + 1) * n;
  auto h_edge = [&](int i, int j) { return j * n + i; };
  auto v_edge = [&](int i, int j) { return horizontal + j * (n + 1) + i; };

  std::vector<std::optional<Complex>> crossing(edge_count);
  auto positive = [](double v) { return v >= 0.0; };
  auto interpolate = [&](Complex p, double gp, Complex q, double gq) {
    const double t = gp / (gp - gq);
    return p + std::clamp(t, 0.0, 1.0) * (q - p);
  };
  bool any = false;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double g0 = G(i, j);
      if (std::isnan(g0)) continue;
      if (i < n && !std::isnan(G(i + 1, j)) && positive(g0) != positive(G(i + 1, j))) {
        crossing[h_edge(i, j)] = interpolate(node(i, j), g0, node(i + 1, j), G(i + 1, j));
        any = true;
      }
      if (j < n && !std::isnan(G(i, j + 1)) && positive(g0) != positive(G(i, j + 1))) {
        crossing[v_edge(i, j)] = interpolate(node(i, j), g0, node(i, j + 1), G(i, j + 1));
        any = true;
      }
    }
  }
  if (!any) throw MethodError("EmptyContour", "no sign change of the ZDP function on the grid");

  // Segments per cell, and the owning cells of every edge.
  std::vector<std::array<int, 2>> links(edge_count, {-1, -1});
  auto link = [&](int a, int b) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      auto& slot = links[x];
      if (slot[0] < 0) {
        slot[0] = y;
      } else if (slot[1] < 0) {
        slot[1] = y;
      }
    }
  };
  std::vector<std::vector<std::pair<int, int>>> edge_cells(edge_count);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int bottom = h_edge(i, j), top = h_edge(i, j + 1);
      const int left = v_edge(i, j), right = v_edge(i + 1, j);
      std::vector<int> crossed;
      for (const int e : {bottom, right, top, left}) {
        if (crossing[e]) crossed.push_back(e);
      }
      for (const int e : crossed) edge_cells[e].emplace_back(i, j);
      if (crossed.size() == 2) {
        link(crossed[0], crossed[1]);
      } else if (crossed.size() == 4) {
        double center = nan;
        try {
          center = field.value(node(i, j) + Complex{0.5 * dx, 0.5 * dy});
        } catch (const Error&) {
        }
        if (!std::isnan(center) && positive(center) == positive(G(i, j))) {
          link(bottom, right);
          link(top, left);
        } else {
          link(bottom, left);
          link(top, right);
        }
      }
    }
  }

  // Newton refinement along the gradient of g.
  const double max_move = std::hypot(dx, dy);
  std::vector<std::optional<std::pair<Complex, double>>> refined(edge_count);
  ZdpResult result;
  result.domain = domain;
  result.grid_n = n;
  std::vector<std::pair<int, int>> active;
  for (int e = 0; e < edge_count; ++e) {
    if (!crossing[e]) continue;
    const Complex start = *crossing[e];
    Complex z = start;
    std::optional<double> residual;
    try {
      for (int it = 0; it <= opt.max_newton; ++it) {
        const double gz = field.value(z);
        if (std::abs(gz) < refine_tol) {
          residual = std::abs(gz);
          break;
        }
        if (it == opt.max_newton) break;
        const Complex grad = field.gradient(z);
        const double norm2 = std::norm(grad);
        if (norm2 == 0.0) break;
        z -= (gz / norm2) * grad;
        if (!is_finite(z) || std::abs(z - start) > max_move) break;
      }
    } catch (const Error&) {
      residual.reset();
    }
    if (residual) {
      refined[e] = std::pair{z, *residual};
      ++result.vertex_count;
      for (const auto& cell : edge_cells[e]) active.push_back(cell);
    } else {
      ++result.dropped_vertices;
    }
  }

  // Chain linked edges into polylines: open chains first, then cycles.
  std::vector<char> visited(edge_count, 0);
  auto walk = [&](int start, bool cycle) {
    ZdpPolyline line;
    line.closed = cycle;
    int cur = start;
    while (cur >= 0 && !visited[cur]) {
      visited[cur] = 1;
      if (refined[cur]) {
        line.points.push_back(refined[cur]->first);
        line.residuals.push_back(refined[cur]->second);
      }
      int next = -1;
      for (const int cand : links[cur]) {
        if (cand >= 0 && !visited[cand]) {
          next = cand;
          break;
        }
      }
      cur = next;
    }
    if (!line.points.empty()) result.polylines.push_back(std::move(line));
  };
  for (int e = 0; e < edge_count; ++e) {
    if (crossing[e] && !visited[e] && (links[e][0] < 0 || links[e][1] < 0)) walk(e, false);
  }
  for (int e = 0; e < edge_count; ++e) {
    if (crossing[e] && !visited[e]) walk(e, true);
  }

  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  result.active_cells = std::move(active);
  return result;
}

}  // namespace sepkit
