#pragma once

// JSON views of the computational results. Keys keep insertion order so the
// documents are byte-stable across runs.

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepkit/equilibria.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/separatrix/candidate.hpp"
#include "sepkit/separatrix/zdp.hpp"

namespace sepkit::io {

using Json = nlohmann::ordered_json;

/// Non-finite numbers become null (JSON has no inf/nan).
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(Complex z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

inline Json to_json(const Rect& r) {
  return Json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

inline Json to_json(const IntegrationSettings& s) {
  return Json{{"rtol", s.rtol},
              {"atol", s.atol},
              {"h_init", s.h_init},
              {"h_min", s.h_min},
              {"r_blowup", s.r_blowup},
              {"t_max", s.t_max},
              {"max_steps", s.max_steps},
              {"closure_tol", s.closure_tol}};
}

inline Json to_json(const Equilibrium& e) {
  Json j{{"z", to_json(e.z0)},
         {"f_prime", to_json(e.f_prime)},
         {"type", to_string(e.kind.type)},
         {"residual", number(e.residual)}};
  switch (e.kind.type) {
    case EquilibriumKind::Type::Node:
      j["stable"] = e.kind.stable;
      break;
    case EquilibriumKind::Type::Center:
      j["orientation"] = e.kind.orientation;
      break;
    case EquilibriumKind::Type::Focus:
      j["stable"] = e.kind.stable;
      j["orientation"] = e.kind.orientation;
      break;
    case EquilibriumKind::Type::Degenerate:
      break;
  }
  return j;
}

inline Json to_json(const SeparatrixCandidate& c) {
  Json diag = Json::object();
  for (const auto& [k, v] : c.diagnostics) diag[k] = number(v);
  return Json{{"z", to_json(c.z)},
              {"method", to_string(c.method)},
              {"residual", number(c.residual)},
              {"converged", c.converged},
              {"diagnostics", std::move(diag)}};
}

inline Json to_json(const ZdpPolyline& line) {
  Json pts = Json::array();
  for (const Complex z : line.points) pts.push_back(Json::array({number(z.real()), number(z.imag())}));
  double worst = 0.0;
  for (const double r : line.residuals) worst = std::max(worst, r);
  return Json{{"closed", line.closed},
              {"vertex_count", line.points.size()},
              {"max_residual", number(worst)},
              {"points", std::move(pts)}};
}

inline Json to_json(const RunVerdict& v) {
  return Json{{"termination", to_string(v.termination)},
              {"time", number(v.time)},
              {"end", to_json(v.end)},
              {"steps", v.steps}};
}

inline Json to_json(const EscapeReport& r) {
  return Json{{"forward", to_json(r.forward)},
              {"backward", to_json(r.backward)},
              {"positive_separatrix", r.is_positive_separatrix},
              {"negative_separatrix", r.is_negative_separatrix}};
}

/// The document layout shared by every command.
inline Json document(Json config, Json results, Json diagnostics) {
  return Json{{"config", std::move(config)},
              {"results", std::move(results)},
              {"diagnostics", std::move(diagnostics)}};
}

}  // namespace sepkit::io
