#pragma once

// Command runner behind the `alf` tool. Parsing of argv lives in the tool;
// this header validates a RunConfig, runs it and writes the report.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alf/curvature.hpp"
#include "alf/decay.hpp"
#include "alf/io.hpp"
#include "alf/mass.hpp"
#include "alf/metric_zoo.hpp"
#include "alf/modes.hpp"
#include "alf/radial.hpp"

namespace alf::cli {

enum ExitCode { kOk = 0, kConfig = 2, kNonConvergence = 3 };

struct ModeSettings {
  int m = 3;
  int j_max = 2;
  int j = 0;
  int k = 0;
  double fiber_length = 1.0;
  /// Weight for `norms`, upper window weight for decay expansions.
  double delta = 0.5;
  /// Exponent a of the synthetic profile r^a (`norms`) or source r^{a-2}.
  double power = -1.0;
  /// `solve-exterior` source: "power" or "bump" (smooth bump on [2, 3]).
  std::string source = "bump";
  /// `solve-exterior` k = 0 operator: "mid" or "outer".
  std::string green = "mid";
  int grid_points = 1024;
};

struct RunConfig {
  std::string command = "mass";
  std::string family = "flat";
  zoo::ParamMap params;
  std::string chart = "isotropic";
  RadiusSchedule schedule;
  QuadratureSpec quadrature;
  std::string output = "json";
  std::string out_path;
  unsigned workers = 1;
  ModeSettings modes;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"mass", "curvature", "modes", "solve-exterior", "norms",
                                              "invariance"};
  return names;
}

inline void validate(const RunConfig& c) {
  auto in = [](const std::string& v, const std::vector<std::string>& set) {
    for (const auto& s : set)
      if (s == v) return true;
    return false;
  };
  if (!in(c.command, command_names())) throw ConfigError("command", "unknown command '" + c.command + "'");
  if (!in(c.output, {"json", "csv", "table"}))
    throw ConfigError("output", "output must be json, csv or table (got '" + c.output + "')");
  const bool metric_cmd = c.command == "mass" || c.command == "curvature" || c.command == "invariance";
  if (metric_cmd && !in(c.family, zoo::registry_names()))
    throw ConfigError("family", "unknown family '" + c.family + "'");
  if (!(c.schedule.r0 > 1.0)) throw ConfigError("r0", "r0 must be > 1");
  if (!(c.schedule.growth > 1.0)) throw ConfigError("growth", "growth must be > 1");
  if (c.schedule.count < 3) throw ConfigError("count", "count must be >= 3");
  if (c.quadrature.polar_nodes < 4) throw ConfigError("polar-nodes", "polar-nodes must be >= 4");
  if (c.quadrature.azimuth_nodes < 4 || c.quadrature.azimuth_nodes % 2)
    throw ConfigError("azimuth-nodes", "azimuth-nodes must be even and >= 4");
  if (c.quadrature.fiber_nodes < 4 || c.quadrature.fiber_nodes % 2)
    throw ConfigError("fiber-nodes", "fiber-nodes must be even and >= 4");
  if (c.workers < 1) throw ConfigError("workers", "workers must be >= 1");
  if (c.modes.m < 3) throw ConfigError("m", "m must be >= 3");
  if (c.modes.j_max < 0) throw ConfigError("jmax", "jmax must be >= 0");
  if (c.modes.j < 0) throw ConfigError("j", "j must be >= 0");
  if (c.modes.k < 0) throw ConfigError("k", "k must be >= 0");
  if (!(c.modes.fiber_length > 0.0)) throw ConfigError("fiber-length", "fiber-length must be positive");
  if (c.modes.grid_points < 64) throw ConfigError("grid-points", "grid-points must be >= 64");
  if (!in(c.modes.source, {"bump", "power"}))
    throw ConfigError("source", "source must be bump or power");
  if (!in(c.modes.green, {"mid", "outer"})) throw ConfigError("green", "green must be mid or outer");
}

namespace detail {

inline io::Json header(const RunConfig& c) {
  io::Json j;
  j["schema"] = io::kSchema;
  j["command"] = c.command;
  return j;
}

inline io::Json params_json(const zoo::ParamMap& p) {
  io::Json j = io::Json::object();
  for (const auto& [k, v] : p) j[k] = io::num(v);
  return j;
}

inline io::Json run_settings(const RunConfig& c) {
  return {{"schedule", {{"r0", io::num(c.schedule.r0)}, {"growth", io::num(c.schedule.growth)}, {"count", c.schedule.count}}},
          {"quadrature",
           {{"polar_nodes", c.quadrature.polar_nodes},
            {"azimuth_nodes", c.quadrature.azimuth_nodes},
            {"fiber_nodes", c.quadrature.fiber_nodes}}}};
}

struct Output {
  io::Json json;
  std::string text;
};

inline Output run_mass(const RunConfig& c) {
  const auto g = zoo::make_metric(c.family, c.params, c.chart);
  MassOptions opt;
  opt.workers = c.workers;
  std::vector<MassReport> reps;
  reps.push_back(mass_gb(g, c.schedule, c.quadrature, opt));
  if (g.model.is_trivial()) reps.push_back(mass_dirac(g, c.schedule, c.quadrature, opt));
  Output out;
  out.json = header(c);
  out.json["family"] = g.family;
  out.json["params"] = params_json(g.params);
  out.json["chart"] = g.chart;
  out.json["model"] = io::model_json(g.model);
  out.json.update(run_settings(c));
  out.json["mass_gb"] = io::to_json(reps[0]);
  if (reps.size() > 1) out.json["mass_dirac"] = io::to_json(reps[1]);
  out.text = c.output == "csv" ? io::mass_csv(reps) : io::mass_table(reps);
  return out;
}

/// Base point at radius r in a fixed generic direction.
inline std::vector<double> ladder_point(int m, double r) {
  std::vector<double> x(m);
  double n = 0.0;
  for (int i = 0; i < m; ++i) {
    x[i] = 1.0 + 0.37 * i;
    n += x[i] * x[i];
  }
  for (double& v : x) v *= r / std::sqrt(n);
  return x;
}

inline Output run_curvature(const RunConfig& c) {
  const auto g = zoo::make_metric(c.family, c.params, c.chart);
  const int m = g.model.base_dim();
  Output out;
  out.json = header(c);
  out.json["family"] = g.family;
  out.json["params"] = params_json(g.params);
  out.json["chart"] = g.chart;
  out.json["model"] = io::model_json(g.model);
  io::Json rows = io::Json::array();
  std::ostringstream csv, table;
  csv << "r,scalar,max_abs_eigenvalue\n";
  table << "curvature (" << g.family << ")\n";
  for (double r : c.schedule.radii()) {
    const FramePoint p = regular_patch(g.model, make_point(ladder_point(m, r), 0.3));
    std::vector<double> y = p.x;
    y.push_back(p.t);
    const RicciResult res = ricci_fd(coordinate_metric(g.model, g.metric, p.patch), y);
    std::vector<double> eig(res.eigenvalues.data(), res.eigenvalues.data() + res.eigenvalues.size());
    const double top = res.eigenvalues.cwiseAbs().maxCoeff();
    rows.push_back({{"r", io::num(r)}, {"scalar", io::num(res.scalar)}, {"eigenvalues", io::num_array(eig)}});
    csv << io::fmt(r) << ',' << io::fmt(res.scalar) << ',' << io::fmt(top) << '\n';
    table << "  r=" << io::fmt(r) << "  scal=" << io::fmt(res.scalar) << "  max|eig|=" << io::fmt(top) << '\n';
  }
  out.json["points"] = rows;
  out.text = c.output == "csv" ? csv.str() : table.str();
  return out;
}

inline Output run_modes(const RunConfig& c) {
  const int m = c.modes.m;
  Output out;
  out.json = header(c);
  out.json["m"] = m;
  io::Json rows = io::Json::array();
  std::ostringstream csv, table;
  csv << "j,lambda_j,delta_j,nu_plus,nu_minus\n";
  table << "  j  lambda_j  delta_j  nu+  nu-\n";
  for (int j = 0; j <= c.modes.j_max; ++j) {
    const IndicialData d = indicial_data(j, m);
    rows.push_back(io::to_json(d));
    csv << j << ',' << io::fmt(d.lambda_j) << ',' << io::fmt(d.delta_j) << ',' << io::fmt(d.nu_plus) << ','
        << io::fmt(d.nu_minus) << '\n';
    table << "  " << j << "  " << io::fmt(d.lambda_j) << "  " << io::fmt(d.delta_j) << "  "
          << io::fmt(d.nu_plus) << "  " << io::fmt(d.nu_minus) << '\n';
  }
  out.json["indicial"] = rows;
  out.json["critical_set"] = io::num_array(critical_set(m, c.modes.j_max));
  table << "  critical:";
  for (double v : critical_set(m, c.modes.j_max)) table << ' ' << io::fmt(v);
  table << '\n';
  out.text = c.output == "csv" ? csv.str() : table.str();
  return out;
}

inline Output run_solve(const RunConfig& c) {
  const auto& s = c.modes;
  const RadialGrid grid{std::log(2.0), std::log(2048.0), s.grid_points};
  std::function<double(double)> src;
  if (s.source == "bump") {
    src = [](double r) { return (r > 2.0 && r < 3.0) ? std::pow(std::sin(kPi * (r - 2.0)), 4) : 0.0; };
  } else {
    const double a = s.power;
    src = [a](double r) { return std::pow(r, a - 2.0); };
  }
  const RadialProfile f = sample_profile(grid, src, s.j, s.k);
  RadialProfile u;
  std::string method;
  if (s.k >= 1) {
    u = solve_k_mode(s.m, s.j, s.k, s.fiber_length, f, grid);
    method = "dirichlet";
  } else if (s.green == "mid") {
    u = green_mid(s.m, s.j, grid.r(0), f);
    method = "green-mid";
  } else {
    u = green_outer(s.m, s.j, f);
    method = "green-outer";
  }
  const double res = relative_residual(u, f, s.m, s.j, s.k, s.fiber_length, s.k >= 1 ? 1 : 0);
  Output out;
  out.json = header(c);
  out.json["m"] = s.m;
  out.json["method"] = method;
  out.json["source"] = s.source;
  out.json["relative_residual"] = io::num(res);
  out.json["profile"] = io::to_json(u);
  out.text = io::profile_csv(u);
  return out;
}

inline Output run_norms(const RunConfig& c) {
  const auto& s = c.modes;
  const RadialGrid grid{std::log(2.0), std::log(2048.0), s.grid_points};
  const double a = s.power;
  const RadialProfile p = sample_profile(grid, [a](double r) { return std::pow(r, a); });
  const MembershipReport rep = classify_membership(p, s.delta, s.m);
  Output out;
  out.json = header(c);
  out.json["m"] = s.m;
  out.json["power"] = io::num(a);
  out.json["delta"] = io::num(s.delta);
  out.json["verdict"] = membership_name(rep.verdict);
  out.json["slope"] = io::num(rep.slope);
  out.json["annulus_squares"] = io::num_array(rep.annulus_squares);
  std::ostringstream csv;
  csv << "annulus,value\n";
  for (std::size_t i = 0; i < rep.annulus_squares.size(); ++i)
    csv << i << ',' << io::fmt(rep.annulus_squares[i]) << '\n';
  out.text = c.output == "csv" ? csv.str()
                               : std::string("r^") + io::fmt(a) + " in L2_" + io::fmt(s.delta) + ": " +
                                     membership_name(rep.verdict) + " (slope " + io::fmt(rep.slope) + ")\n";
  return out;
}

inline Output run_invariance(const RunConfig& c) {
  const auto a = zoo::make_metric(c.family, c.params, "area");
  const auto b = zoo::make_metric(c.family, c.params, "isotropic");
  MassOptions opt;
  opt.workers = c.workers;
  const auto gb = chart_invariance_check(a, b, c.schedule, c.quadrature, MassKind::GaussBonnet, opt);
  Output out;
  out.json = header(c);
  out.json["family"] = a.family;
  out.json["params"] = params_json(a.params);
  out.json.update(run_settings(c));
  out.json["gb"] = {{"area", io::num(gb.first.extrapolated)},
                    {"isotropic", io::num(gb.second.extrapolated)},
                    {"discrepancy", io::num(gb.discrepancy)}};
  std::ostringstream csv, table;
  csv << "kind,area,isotropic,discrepancy\n";
  csv << "gb," << io::fmt(gb.first.extrapolated) << ',' << io::fmt(gb.second.extrapolated) << ','
      << io::fmt(gb.discrepancy) << '\n';
  table << "gb: area " << io::fmt(gb.first.extrapolated) << "  isotropic " << io::fmt(gb.second.extrapolated)
        << "  |delta| " << io::fmt(gb.discrepancy) << '\n';
  if (a.model.is_trivial()) {
    const auto d = chart_invariance_check(a, b, c.schedule, c.quadrature, MassKind::Dirac, opt);
    out.json["dirac"] = {{"area", io::num(d.first.extrapolated)},
                         {"isotropic", io::num(d.second.extrapolated)},
                         {"discrepancy", io::num(d.discrepancy)}};
    csv << "dirac," << io::fmt(d.first.extrapolated) << ',' << io::fmt(d.second.extrapolated) << ','
        << io::fmt(d.discrepancy) << '\n';
    table << "dirac: area " << io::fmt(d.first.extrapolated) << "  isotropic "
          << io::fmt(d.second.extrapolated) << "  |delta| " << io::fmt(d.discrepancy) << '\n';
  }
  out.text = c.output == "csv" ? csv.str() : table.str();
  return out;
}

inline void emit(const RunConfig& c, const std::string& payload, std::ostream& fallback) {
  if (c.out_path.empty()) {
    fallback << payload;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot open '" + c.out_path + "' for writing");
  f << payload;
}

inline std::string diagnostic(const RunConfig& c, const std::string& status, const std::string& message,
                              const io::Json& extra = {}) {
  io::Json j = header(c);
  j["status"] = status;
  j["message"] = message;
  if (!extra.is_null()) j.update(extra);
  return j.dump(2) + "\n";
}

}  // namespace detail

/// Runs one command. The report goes to `c.out_path` (or `out`); on failure a
/// JSON diagnostic is written there instead and the message goes to `err`.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    validate(c);
    detail::Output o;
    if (c.command == "mass") o = detail::run_mass(c);
    else if (c.command == "curvature") o = detail::run_curvature(c);
    else if (c.command == "modes") o = detail::run_modes(c);
    else if (c.command == "solve-exterior") o = detail::run_solve(c);
    else if (c.command == "norms") o = detail::run_norms(c);
    else o = detail::run_invariance(c);
    o.json["status"] = "ok";
    detail::emit(c, c.output == "json" ? o.json.dump(2) + "\n" : o.text, out);
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << " [key: " << e.key() << "]\n";
    try {
      detail::emit(c, detail::diagnostic(c, "config-error", e.what(), {{"key", e.key()}}), out);
    } catch (const ConfigError&) {
      detail::emit(RunConfig{}, detail::diagnostic(c, "config-error", e.what(), {{"key", e.key()}}), out);
    }
    return kConfig;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    io::Json extra = {{"radii", io::num_array(e.radii())}, {"values", io::num_array(e.values())}};
    detail::emit(c, detail::diagnostic(c, "non-convergence", e.what(), extra), out);
    return kNonConvergence;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    detail::emit(c, detail::diagnostic(c, "domain-error", e.what()), out);
    return kConfig;
  } catch (const UnsupportedModelError& e) {
    err << "error: " << e.what() << '\n';
    detail::emit(c, detail::diagnostic(c, "unsupported-model", e.what()), out);
    return kConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    detail::emit(c, detail::diagnostic(c, "numerical-failure", e.what()), out);
    return kNonConvergence;
  }
}

}  // namespace alf::cli
