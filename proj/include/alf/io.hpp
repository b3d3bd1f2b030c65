#pragma once

// JSON / CSV / table serialization of reports. Floats are rounded to 12
// significant digits so identical runs give byte-identical output.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "alf/decay.hpp"
#include "alf/mass.hpp"
#include "alf/modes.hpp"
#include "alf/radial.hpp"

namespace alf::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "alf-mass/1";

/// Rounds to 12 significant digits; non-finite values become null.
inline Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline Json num_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(num(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline Json model_json(const ModelMetric& model) {
  Json j;
  j["fibration"] = model.fibration_name();
  j["base_dim"] = model.base_dim();
  j["fiber_length"] = num(model.fiber_length());
  if (!model.is_trivial()) j["monopole_charge"] = model.monopole_charge();
  j["sphere_area"] = num(sphere_area(model.base_dim()));
  return j;
}

inline Json to_json(const MassReport& r) {
  Json j;
  j["kind"] = mass_kind_name(r.kind);
  j["family"] = r.family;
  j["radii"] = num_array(r.radii);
  j["values"] = num_array(r.values);
  j["mass"] = num(r.extrapolated);
  j["fit_order"] = num(r.fit_order);
  j["residual"] = num(r.residual);
  j["aitken"] = num(r.aitken);
  j["method"] = r.method;
  j["model"] = {{"base_dim", r.base_dim},
                {"fiber_length", num(r.fiber_length)},
                {"fibration", r.fibration},
                {"sphere_area", num(r.sphere_area)}};
  return j;
}

inline std::string mass_csv(const std::vector<MassReport>& reports) {
  std::ostringstream os;
  os << "kind,R,value\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.radii.size(); ++i)
      os << mass_kind_name(r.kind) << ',' << fmt(r.radii[i]) << ',' << fmt(r.values[i]) << '\n';
  return os.str();
}

inline std::string mass_table(const std::vector<MassReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << mass_kind_name(r.kind) << " mass (" << r.family << ", " << r.fibration
       << ", L=" << fmt(r.fiber_length) << ")\n";
    os << "  " << std::left << std::setw(20) << "R" << "value\n";
    for (std::size_t i = 0; i < r.radii.size(); ++i)
      os << "  " << std::setw(20) << fmt(r.radii[i]) << fmt(r.values[i]) << '\n';
    os << "  extrapolated " << fmt(r.extrapolated) << "  order " << fmt(r.fit_order) << "  residual "
       << fmt(r.residual) << "  (" << r.method << ")\n";
  }
  return os.str();
}

inline Json to_json(const IndicialData& d) {
  return {{"j", d.j},
          {"lambda_j", num(d.lambda_j)},
          {"delta_j", num(d.delta_j)},
          {"nu_plus", num(d.nu_plus)},
          {"nu_minus", num(d.nu_minus)}};
}

/// RadialProfile as "s,r,value" rows.
inline std::string profile_csv(const RadialProfile& p) {
  std::ostringstream os;
  os << "s,r,value\n";
  for (int i = 0; i < p.grid.n_points; ++i)
    os << fmt(p.grid.s(i)) << ',' << fmt(p.grid.r(i)) << ',' << fmt(p.values[i]) << '\n';
  return os.str();
}

inline Json to_json(const RadialProfile& p) {
  Json j;
  j["mode"] = {{"j", p.j}, {"k", p.k}};
  j["grid"] = {{"s_min", num(p.grid.s_min)}, {"s_max", num(p.grid.s_max)}, {"n_points", p.grid.n_points}};
  j["values"] = num_array(p.values);
  return j;
}

inline Json to_json(const DecayExpansion& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms)
    terms.push_back({{"mode", t.j}, {"sign", t.sign > 0 ? "+" : "-"}, {"coefficient", num(t.coefficient)}});
  Json j;
  j["terms"] = terms;
  j["remainder_rate"] = num(e.remainder_rate);
  j["exponential_slope"] = num(e.exponential_slope);
  j["remainder_vanishes"] = e.remainder_vanishes;
  j["radii"] = num_array(e.radii);
  j["remainder"] = num_array(e.remainder);
  return j;
}

}  // namespace alf::io
