#pragma once

// The `sepkit` command-line tool. Values are layered: command-line flags win
// over the TOML file given by --config, which wins over built-in defaults.
//
// Exit codes: 0 success, 2 usage or parse error, 3 no converged result,
// 4 I/O error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepkit/cli/values.hpp"
#include "sepkit/equilibria.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/io/csv.hpp"
#include "sepkit/io/figures.hpp"
#include "sepkit/io/json.hpp"
#include "sepkit/separatrix/bvp.hpp"
#include "sepkit/separatrix/curvature.hpp"
#include "sepkit/separatrix/index_scan.hpp"
#include "sepkit/separatrix/zdp.hpp"

namespace sepkit::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_no_result = 3, exit_io = 4 };

class IoError : public Error {
 public:
  using Error::Error;
};

/// No converged result; reported with exit code 3.
class NoResult : public Error {
 public:
  using Error::Error;
};

/// Option values exactly as they arrived from the command line or the
/// configuration file.
struct RawOptions {
  std::string config;
  std::string rtol, atol;
  bool quiet = false;

  std::string f, domain, grid, out, format, method;
  std::string segment, epsilon, t1, bracket, tol, z0, tmax;
  std::vector<std::string> xstar, seed;
};

struct RunConfig {
  std::string command;
  std::string function;
  Rect domain{-10.0, 10.0, -1.5 * pi, 1.5 * pi};
  std::optional<int> grid;
  std::string out;
  std::string format = "svg";
  std::string method;

  std::optional<std::pair<Complex, Complex>> segment;
  double epsilon = 0.1;
  std::vector<double> xstar;
  double t1 = 0.1;
  std::pair<double, double> bracket{-1.0, 1.0};
  std::vector<Complex> seeds;
  std::optional<double> tol;
  std::optional<Complex> z0;

  IntegrationSettings settings;
  bool quiet = false;

  int grid_or(int fallback) const { return grid.value_or(fallback); }
  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

namespace detail {

inline int parse_grid(const std::string& text) {
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw UsageError("grid must be an integer: '" + text + "'");
  if (n < 2) throw UsageError("grid must be at least 2");
  return n;
}

inline double parse_positive(const std::string& text, const char* what) {
  const double v = parse_real(text);
  if (!(v > 0.0)) throw UsageError(std::string(what) + " must be positive");
  return v;
}

inline RunConfig resolve(const std::string& command, const RawOptions& raw) {
  RunConfig c;
  c.command = command;
  c.quiet = raw.quiet;
  c.function = raw.f;
  if (c.function.empty()) throw UsageError("--f is required (command line or config file)");
  if (!raw.domain.empty()) c.domain = parse_domain(raw.domain);
  if (!raw.grid.empty()) c.grid = parse_grid(raw.grid);
  c.out = raw.out;
  if (!raw.format.empty()) c.format = raw.format;
  if (c.format != "svg" && c.format != "csv") throw UsageError("--format must be svg or csv");
  c.method = raw.method;

  if (!raw.segment.empty()) c.segment = parse_segment(raw.segment);
  if (!raw.epsilon.empty()) c.epsilon = parse_positive(raw.epsilon, "--epsilon");
  for (const auto& x : raw.xstar) {
    for (const double v : parse_reals(x)) c.xstar.push_back(v);
  }
  if (!raw.t1.empty()) c.t1 = parse_positive(raw.t1, "--t1");
  if (!raw.bracket.empty()) {
    const auto b = parse_reals(raw.bracket, 2);
    if (!(b[0] < b[1])) throw UsageError("--bracket must satisfy lo < hi");
    c.bracket = {b[0], b[1]};
  }
  for (const auto& s : raw.seed) c.seeds.push_back(parse_point(s));
  if (!raw.tol.empty()) c.tol = parse_positive(raw.tol, "--tol");
  if (!raw.z0.empty()) c.z0 = parse_point(raw.z0);

  if (!raw.rtol.empty()) c.settings.rtol = parse_positive(raw.rtol, "--rtol");
  if (!raw.atol.empty()) c.settings.atol = parse_positive(raw.atol, "--atol");
  if (!raw.tmax.empty()) c.settings.t_max = parse_positive(raw.tmax, "--tmax");
  try {
    c.settings.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

/// Applies configuration items to options that were not given on the command
/// line. A [subcommand] table applies to that subcommand only and takes
/// precedence over top-level keys, which address the active subcommand or
/// the global options.
inline void apply_config(CLI::App& app, CLI::App& active, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::FileError& e) {
    throw IoError("cannot read config file '" + path + "'");
  } catch (const CLI::Error& e) {
    throw UsageError("malformed config file '" + path + "': " + e.what());
  }
  for (const bool section_pass : {true, false}) {
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;  // table markers
      if (item.parents.size() > 1) throw UsageError("unsupported nesting: " + item.fullname());
      if (item.parents.empty() == section_pass) continue;
      if (section_pass && item.parents[0] != active.get_name()) continue;
      if (item.name == "config") throw UsageError("config files cannot include other config files");
      CLI::Option* opt = active.get_option_no_throw("--" + item.name);
      if (opt == nullptr) opt = app.get_option_no_throw("--" + item.name);
      if (opt == nullptr) throw UsageError("unknown config key '" + item.fullname() + "'");
      if (opt->count() != 0) continue;
      opt->add_result(item.inputs);
      opt->run_callback();
    }
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

inline void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
  }
}

inline io::Json settings_json(const RunConfig& c) { return io::to_json(c.settings); }

inline io::Json config_echo(const RunConfig& c) {
  io::Json j{{"command", c.command}, {"function", c.function}};
  return j;
}

inline std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

inline void note(const RunConfig& c, std::ostream& out, const std::string& line) {
  if (!c.quiet && !c.out.empty()) out << line << '\n';
}

// Deterministic aggregation: candidates ordered by position.
inline void sort_by_position(std::vector<SeparatrixCandidate>& v) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
}

}  // namespace detail

inline int cmd_portrait(const RunConfig& c, const HolomorphicFunction& f, std::ostream& out) {
  const int n = c.grid_or(12);
  const io::Portrait p = io::compute_portrait(f, c.domain, n, c.settings);
  if (c.format == "csv") {
    if (c.out.empty()) throw UsageError("--format csv needs --out DIRECTORY");
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) throw IoError("cannot create directory '" + c.out + "'");
    for (std::size_t k = 0; k < p.trajectories.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "trajectory_%04zu.csv", k);
      std::ostringstream os;
      io::write_trajectory_csv(os, p.trajectories[k].combined());
      detail::write_text((std::filesystem::path(c.out) / name).string(), os.str());
    }
    detail::note(c, out,
                 "wrote " + std::to_string(p.trajectories.size()) + " trajectories to " + c.out);
    return exit_ok;
  }
  detail::emit(c, out, io::render_portrait_svg(p, "phase portrait of " + c.function));
  detail::note(c, out,
               "wrote " + std::to_string(p.trajectories.size()) + " trajectories to " + c.out);
  return exit_ok;
}

inline int cmd_field(const RunConfig& c, const HolomorphicFunction& f, std::ostream& out) {
  const int n = c.grid_or(25);
  const auto field = io::compute_field(f, c.domain, n);
  std::ostringstream csv;
  io::write_field_csv(csv, field);
  if (c.out.empty()) {
    out << io::render_field_svg(c.domain, n, field, "direction field of " + c.function);
    return exit_ok;
  }
  std::filesystem::path path(c.out);
  if (path.extension() == ".csv") {
    detail::write_text(c.out, csv.str());
  } else {
    detail::write_text(c.out, io::render_field_svg(c.domain, n, field,
                                                   "direction field of " + c.function));
    detail::write_text(path.replace_extension(".csv").string(), csv.str());
  }
  detail::note(c, out, "wrote " + std::to_string(field.size()) + " field samples to " + c.out);
  return exit_ok;
}

inline int cmd_equilibria(const RunConfig& c, const HolomorphicFunction& f, std::ostream& out) {
  const int n = c.grid_or(40);
  ZeroSearchOptions opt;
  if (c.tol) opt.zero_tol = *c.tol;
  const auto eq = find_zeros(f, c.domain, n, opt);

  io::Json config = detail::config_echo(c);
  config["domain"] = io::to_json(c.domain);
  config["grid"] = n;
  config["zero_tol"] = opt.zero_tol;
  config["tol_class"] = opt.tol_class;
  io::Json results = io::Json::array();
  for (const auto& e : eq) results.push_back(io::to_json(e));
  const io::Json diag{{"count", eq.size()}};
  detail::emit(c, out, detail::dump(io::document(config, results, diag)));
  detail::note(c, out, "found " + std::to_string(eq.size()) + " equilibria");
  if (eq.empty()) throw NoResult("no equilibria in the domain");
  return exit_ok;
}

namespace detail {

/// The two centers closest to the midpoint of the segment.
inline CenterPair nearest_centers(const HolomorphicFunction& f, const Rect& domain, Complex near) {
  std::vector<Equilibrium> centers;
  for (const auto& e : find_zeros(f, domain, 40)) {
    if (e.kind.type == EquilibriumKind::Type::Center) centers.push_back(e);
  }
  if (centers.size() < 2) throw NoResult("index method needs two centers in the domain");
  std::stable_sort(centers.begin(), centers.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.z0 - near) < std::abs(b.z0 - near);
  });
  return {centers[0], centers[1]};
}

}  // namespace detail

inline int cmd_separatrix(const RunConfig& c, const HolomorphicFunction& f, std::ostream& out) {
  io::Json config = detail::config_echo(c);
  config["method"] = c.method;
  io::Json results = io::Json::array();
  io::Json diag = io::Json::object();
  std::size_t converged = 0;

  auto add_candidates = [&](std::vector<SeparatrixCandidate> cands) {
    detail::sort_by_position(cands);
    for (const auto& cand : cands) {
      if (cand.converged) ++converged;
      results.push_back(io::to_json(cand));
    }
  };

  if (c.method == "index") {
    if (!c.segment) throw UsageError("--method index needs --segment RE0,IM0,RE1,IM1");
    const double tol = c.tol_or(1e-8);
    config["domain"] = io::to_json(c.domain);
    config["segment"] = {io::to_json(c.segment->first), io::to_json(c.segment->second)};
    config["epsilon"] = c.epsilon;
    config["tol"] = tol;
    const CenterPair centers =
        detail::nearest_centers(f, c.domain, 0.5 * (c.segment->first + c.segment->second));
    diag["centers"] = {io::to_json(centers.first), io::to_json(centers.second)};
    add_candidates(index_scan(f, *c.segment, centers, c.epsilon, c.settings, tol));
  } else if (c.method == "zdp") {
    const int n = c.grid_or(400);
    const double tol = c.tol_or(1e-12);
    config["domain"] = io::to_json(c.domain);
    config["grid"] = n;
    config["tol"] = tol;
    const ZdpResult z = zdp_curve(f, c.domain, n, tol);
    for (const auto& line : z.polylines) results.push_back(io::to_json(line));
    converged = z.vertex_count;
    diag["polylines"] = z.polylines.size();
    diag["vertex_count"] = z.vertex_count;
    diag["dropped_vertices"] = z.dropped_vertices;
    diag["active_cells"] = z.active_cells.size();
  } else if (c.method == "bvp") {
    if (c.xstar.empty()) throw UsageError("--method bvp needs --xstar X[,X...]");
    BvpProblem proto;
    proto.t1 = c.t1;
    proto.bracket = c.bracket;
    proto.settings = c.settings;
    if (c.tol) proto.s_tol = *c.tol;
    config["xstar"] = c.xstar;
    config["t0"] = proto.t0;
    config["t1"] = proto.t1;
    config["bracket"] = {proto.bracket.first, proto.bracket.second};
    config["s_tol"] = proto.s_tol;
    io::Json failures = io::Json::array();
    std::vector<SeparatrixCandidate> cands;
    for (const double x : c.xstar) {
      BvpProblem p = proto;
      p.x_star = x;
      try {
        cands.push_back(bvp_separatrix_point(f, p));
      } catch (const MethodError& e) {
        failures.push_back({{"x_star", x}, {"error", e.code()}, {"message", e.what()}});
      }
    }
    add_candidates(std::move(cands));
    diag["failures"] = std::move(failures);
  } else if (c.method == "curvature") {
    if (c.seeds.empty()) throw UsageError("--method curvature needs at least one --seed RE,IM");
    config["seeds"] = io::Json::array();
    for (const Complex s : c.seeds) config["seeds"].push_back(io::to_json(s));
    io::Json failures = io::Json::array();
    std::vector<SeparatrixCandidate> cands;
    for (const Complex s : c.seeds) {
      try {
        cands.push_back(curvature_max_scan(f, s, c.settings));
      } catch (const Error& e) {
        failures.push_back({{"seed", io::to_json(s)}, {"message", e.what()}});
      }
    }
    add_candidates(std::move(cands));
    diag["failures"] = std::move(failures);
  } else {
    throw UsageError("--method must be one of index, zdp, bvp, curvature");
  }

  config["settings"] = detail::settings_json(c);
  diag["converged"] = converged;
  detail::emit(c, out, detail::dump(io::document(config, results, diag)));
  detail::note(c, out, std::to_string(converged) + " converged results");
  if (converged == 0) throw NoResult("no converged separatrix candidate");
  return exit_ok;
}

inline int cmd_escape(const RunConfig& c, const HolomorphicFunction& f, std::ostream& out) {
  if (!c.z0) throw UsageError("escape needs --z0 RE,IM");
  const EscapeReport r = escape_report(f, *c.z0, c.settings);
  io::Json config = detail::config_echo(c);
  config["z0"] = io::to_json(*c.z0);
  config["settings"] = detail::settings_json(c);
  const io::Json diag{{"separatrix", r.is_separatrix()}};
  detail::emit(c, out, detail::dump(io::document(config, io::Json::array({io::to_json(r)}), diag)));
  detail::note(c, out, std::string("forward: ") + to_string(r.forward.termination) +
                           ", backward: " + to_string(r.backward.termination));
  return exit_ok;
}

/// Entry point of the tool; `out` receives documents and summaries, `err`
/// receives diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Separatrices of holomorphic flows dz/dt = f(z)", "sepkit"};
  app.require_subcommand(1);
  app.fallthrough();
  RawOptions raw;
  app.add_option("--config", raw.config, "TOML file with option defaults");
  app.add_option("--rtol", raw.rtol, "relative integration tolerance");
  app.add_option("--atol", raw.atol, "absolute integration tolerance");
  app.add_flag("--quiet", raw.quiet, "suppress summaries");

  auto common = [&](CLI::App* sub, bool with_domain, bool with_grid) {
    sub->add_option("--f", raw.f, "right-hand side f(z)");
    if (with_domain) sub->add_option("--domain", raw.domain, "XMIN,XMAX,YMIN,YMAX ('pi' allowed)");
    if (with_grid) sub->add_option("--grid", raw.grid, "grid cells per side");
    sub->add_option("--out", raw.out, "output path (stdout when omitted)");
  };

  CLI::App* portrait = app.add_subcommand("portrait", "phase portrait (SVG or per-trajectory CSV)");
  common(portrait, true, true);
  portrait->add_option("--format", raw.format, "svg or csv");

  CLI::App* field = app.add_subcommand("field", "direction field (SVG plus CSV)");
  common(field, true, true);

  CLI::App* equilibria = app.add_subcommand("equilibria", "zeros of f and their types");
  common(equilibria, true, true);
  equilibria->add_option("--tol", raw.tol, "zero tolerance |f(z)|");

  CLI::App* separatrix = app.add_subcommand("separatrix", "separatrix candidates");
  common(separatrix, true, true);
  separatrix->add_option("--method", raw.method, "index, zdp, bvp or curvature");
  separatrix->add_option("--segment", raw.segment, "index: RE0,IM0,RE1,IM1");
  separatrix->add_option("--epsilon", raw.epsilon, "index: probe distance");
  separatrix->add_option("--xstar", raw.xstar, "bvp: target real parts X[,X...]");
  separatrix->add_option("--t1", raw.t1, "bvp: end time");
  separatrix->add_option("--bracket", raw.bracket, "bvp: LO,HI search interval for Im z(t0)");
  separatrix->add_option("--seed", raw.seed, "curvature: seed point RE,IM (repeatable)");
  separatrix->add_option("--tol", raw.tol, "method tolerance");

  CLI::App* escape = app.add_subcommand("escape", "escape-time report for one point");
  common(escape, false, false);
  escape->add_option("--z0", raw.z0, "start point RE,IM");
  escape->add_option("--tmax", raw.tmax, "time horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_usage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!raw.config.empty()) detail::apply_config(app, *active, raw.config);
    const RunConfig cfg = detail::resolve(active->get_name(), raw);
    const HolomorphicFunction f = HolomorphicFunction::parse(cfg.function);
    if (active == portrait) return cmd_portrait(cfg, f, out);
    if (active == field) return cmd_field(cfg, f, out);
    if (active == equilibria) return cmd_equilibria(cfg, f, out);
    if (active == separatrix) return cmd_separatrix(cfg, f, out);
    return cmd_escape(cfg, f, out);
  } catch (const ParseError& e) {
    err << "sepkit: cannot parse f: " << e.what() << '\n';
    return exit_usage;
  } catch (const UsageError& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_usage;
  } catch (const CLI::Error& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_usage;
  } catch (const InvalidArgument& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_io;
  } catch (const NoResult& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_no_result;
  } catch (const MethodError& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_no_result;
  } catch (const Error& e) {
    err << "sepkit: " << e.what() << '\n';
    return exit_no_result;
  }
}

}  // namespace sepkit::cli
