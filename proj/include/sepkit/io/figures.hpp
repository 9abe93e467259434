#pragma once

// Phase portraits and direction fields: computation and SVG rendering.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sepkit/equilibria.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/io/csv.hpp"
#include "sepkit/io/svg.hpp"

namespace sepkit::io {

/// Centers of an n x n cell lattice on the domain, row by row from the bottom.
inline std::vector<Complex> grid_seeds(const Rect& domain, int n) {
  if (n < 1) throw InvalidArgument("grid must have at least one cell per side");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  const double dx = domain.width() / n, dy = domain.height() / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.emplace_back(domain.x_min + (i + 0.5) * dx, domain.y_min + (j + 0.5) * dy);
    }
  }
  return out;
}

struct PortraitTrajectory {
  Complex seed{};
  Trajectory forward;
  Trajectory backward;  // empty when the forward run closed

  /// Backward samples (reversed, negative times) followed by forward samples.
  std::vector<Sample> combined() const {
    std::vector<Sample> out;
    for (auto it = backward.samples.rbegin(); it != backward.samples.rend(); ++it) {
      if (it->t != 0.0) out.push_back({-it->t, it->z});
    }
    out.insert(out.end(), forward.samples.begin(), forward.samples.end());
    return out;
  }
};

struct Portrait {
  Rect domain;
  std::vector<PortraitTrajectory> trajectories;
  std::vector<Equilibrium> equilibria;
};

/// Real-time trajectories through every grid seed, followed both ways until
/// they leave the domain, close, or reach t_max.
inline Portrait compute_portrait(const HolomorphicFunction& f, const Rect& domain, int grid_n,
                                 const IntegrationSettings& s) {
  Portrait p;
  p.domain = domain;
  Monitor m;
  m.bounds = domain;
  for (const Complex seed : grid_seeds(domain, grid_n)) {
    PortraitTrajectory pt;
    pt.seed = seed;
    pt.forward = integrate(f, seed, TimeDirection::real_time(), s, m);
    if (pt.forward.termination != Termination::ClosedOrbit) {
      pt.backward = integrate(f, seed, TimeDirection::reversed_real_time(), s, m);
    }
    p.trajectories.push_back(std::move(pt));
  }
  try {
    p.equilibria = find_zeros(f, domain, 40);
  } catch (const Error&) {
  }
  return p;
}

inline std::string render_portrait_svg(const Portrait& p, const std::string& title) {
  SvgCanvas canvas(p.domain);
  canvas.open_group("class=\"trajectories\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"0.8\"");
  for (const auto& tr : p.trajectories) {
    std::vector<Complex> pts;
    for (const Sample& s : tr.combined()) pts.push_back(s.z);
    canvas.path(pts, "trajectory");
  }
  canvas.close_group();

  // One arrowhead per trajectory, halfway along the forward arc.
  canvas.open_group("class=\"arrowheads\" fill=\"#1f4e79\"");
  for (const auto& tr : p.trajectories) {
    const auto& smp = tr.forward.samples;
    if (smp.size() < 2) continue;
    double total = 0.0;
    for (std::size_t k = 1; k < smp.size(); ++k) total += std::abs(smp[k].z - smp[k - 1].z);
    if (total * canvas.scale() < 6.0) continue;
    double acc = 0.0;
    std::size_t k = 1;
    for (; k + 1 < smp.size(); ++k) {
      acc += std::abs(smp[k].z - smp[k - 1].z);
      if (acc >= 0.5 * total) break;
    }
    const Complex dir = smp[k].z - smp[k - 1].z;
    if (std::abs(dir) == 0.0) continue;
    canvas.arrowhead(canvas.map(smp[k].z), SvgCanvas::screen_direction(dir), 7.0, "arrowhead");
  }
  canvas.close_group();

  canvas.open_group("class=\"equilibria\" stroke=\"black\" fill=\"#c0392b\"");
  for (const auto& e : p.equilibria) {
    canvas.circle(canvas.map(e.z0), 4.0, "equilibrium " + to_string(e.kind.type));
  }
  canvas.close_group();
  return canvas.str(title);
}

/// f sampled at the cell centers of an n x n lattice.
inline std::vector<FieldSample> compute_field(const HolomorphicFunction& f, const Rect& domain,
                                              int grid_n) {
  std::vector<FieldSample> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const Complex z : grid_seeds(domain, grid_n)) {
    FieldSample s{z.real(), z.imag(), nan, nan};
    try {
      const Complex w = f(z);
      s.fx = w.real();
      s.fy = w.imag();
    } catch (const Error&) {
    }
    out.push_back(s);
  }
  return out;
}

/// One `<g class="arrow">` per sample; arrows are normalized to a fixed
/// length, zeros and undefined points are drawn as dots.
inline std::string render_field_svg(const Rect& domain, int grid_n,
                                    const std::vector<FieldSample>& field,
                                    const std::string& title) {
  SvgCanvas canvas(domain);
  const double cell_px =
      std::min(domain.width(), domain.height()) / grid_n * canvas.scale();
  const double len = 0.8 * cell_px;
  canvas.open_group("class=\"field\" stroke=\"#1f4e79\" fill=\"#1f4e79\" stroke-width=\"1\"");
  for (const FieldSample& s : field) {
    const Complex c = canvas.map({s.x, s.y});
    const Complex w{s.fx, s.fy};
    if (!is_finite(w) || std::abs(w) == 0.0) {
      canvas.open_group("class=\"arrow\"");
      canvas.circle(c, 1.5, "singular");
      canvas.close_group();
      continue;
    }
    const Complex u = SvgCanvas::screen_direction(w / std::abs(w));
    const Complex tail = c - 0.5 * len * u, tip = c + 0.5 * len * u;
    canvas.open_group("class=\"arrow\"");
    canvas.line(tail, tip - 0.3 * len * u);
    canvas.arrowhead(tip, u, 0.35 * len, "head");
    canvas.close_group();
  }
  canvas.close_group();
  return canvas.str(title);
}

}  // namespace sepkit::io
