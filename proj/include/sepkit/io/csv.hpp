#pragma once

// Plain CSV writers. Numbers use %.17g, so values round-trip exactly and
// output is byte-identical for identical input.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "sepkit/flow.hpp"

namespace sepkit::io {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header "t,re,im", one sample per row.
inline void write_trajectory_csv(std::ostream& os, const std::vector<Sample>& samples) {
  os << "t,re,im\n";
  for (const Sample& s : samples) {
    os << format_real(s.t) << ',' << format_real(s.z.real()) << ',' << format_real(s.z.imag())
       << '\n';
  }
}

struct FieldSample {
  double x = 0.0;
  double y = 0.0;
  double fx = 0.0;  // Re f, NaN where f is undefined
  double fy = 0.0;  // Im f
};

/// Header "x,y,fx,fy", one grid node per row.
inline void write_field_csv(std::ostream& os, const std::vector<FieldSample>& field) {
  os << "x,y,fx,fy\n";
  for (const FieldSample& s : field) {
    os << format_real(s.x) << ',' << format_real(s.y) << ',' << format_real(s.fx) << ','
       << format_real(s.fy) << '\n';
  }
}

}  // namespace sepkit::io
