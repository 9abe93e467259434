#pragma once

#include <map>
#include <string>

#include "sepkit/core.hpp"

namespace sepkit {

enum class SeparatrixMethod { IndexScan, Zdp, Bvp, Curvature };

inline std::string to_string(SeparatrixMethod m) {
  switch (m) {
    case SeparatrixMethod::IndexScan: return "index";
    case SeparatrixMethod::Zdp: return "zdp";
    case SeparatrixMethod::Bvp: return "bvp";
    case SeparatrixMethod::Curvature: return "curvature";
  }
  return "unknown";
}

/// A point localized on (or near) a separatrix. The meaning of `residual`
/// depends on the producing method.
struct SeparatrixCandidate {
  Complex z{};
  SeparatrixMethod method = SeparatrixMethod::IndexScan;
  double residual = 0.0;
  bool converged = false;
  std::map<std::string, double> diagnostics;
};

}  // namespace sepkit
