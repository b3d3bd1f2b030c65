#pragma once

// Closed-form ALF metrics: Schwarzschild (any n >= 4), Reissner–Nordström
// (n = 4) and (multi-)Taub-NUT asymptotics, each in the adapted frame of its
// model. Components are templates over the scalar type so that exact
// derivatives come from complex-step differentiation.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "alf/geometry.hpp"

namespace alf::zoo {

template <class S>
using MatrixS = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

enum class Chart { AreaRadial, Isotropic };

inline std::string chart_name(Chart c) { return c == Chart::AreaRadial ? "area" : "isotropic"; }

/// Complex-step derivative of a t-independent family. `comp(x)` must accept
/// std::vector<double> and std::vector<Complex>.
template <class Comp>
CovDerivTensor exact_cov_derivative(const ModelMetric& model, const Comp& comp,
                                    const FramePoint& p) {
  const int m = model.base_dim();
  const int n = m + 1;
  const Matrix g = comp(p.x);
  std::vector<Matrix> raw(n, Matrix::Zero(n, n));
  std::vector<Complex> xc(p.x.begin(), p.x.end());
  for (int c = 0; c < m; ++c) {
    xc[c] += Complex(0.0, kComplexStep);
    raw[c] = comp(xc).imag() / kComplexStep;
    xc[c] = p.x[c];
  }
  return covariant_from_directional(frame_connection_coeffs(model, p), g, std::move(raw));
}

template <class S>
S norm(const std::vector<S>& x) {
  S s(0.0);
  for (const auto& xi : x) s += xi * xi;
  return std::sqrt(s);
}

/// Frame tensor δ_ij + (a(r) - 1) n_i n_j on the base, fiber entry b(r).
template <class S>
MatrixS<S> radial_split(const std::vector<S>& x, const S& r, const S& a, const S& b) {
  const int m = static_cast<int>(x.size());
  MatrixS<S> g = MatrixS<S>::Identity(m + 1, m + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) += (a - 1.0) * x[i] * x[j] / (r * r);
  g(m, m) = b;
  return g;
}

template <class S>
MatrixS<S> conformal_split(int m, const S& psi, const S& b) {
  MatrixS<S> g = MatrixS<S>::Identity(m + 1, m + 1) * psi;
  g(m, m) = b;
  return g;
}

// ---------------------------------------------------------------------------
// Flat

inline MetricFamily flat_family(const ModelMetric& model) {
  const int n = model.dim();
  MetricFamily f;
  f.name = "flat";
  f.components = [n](const FramePoint&) { return Matrix(Matrix::Identity(n, n)); };
  f.exact_derivative = [n](const FramePoint&) { return CovDerivTensor::zero(n); };
  f.decay_order = 1e9;
  return f;
}

// ---------------------------------------------------------------------------
// Schwarzschild

struct SchwarzschildParams {
  int n = 4;
  double gamma = 1.0;

  void validate() const {
    if (n < 4) throw DomainError("schwarzschild: dimension n must be >= 4");
    if (!(gamma > 0.0)) throw DomainError("schwarzschild: gamma must be positive");
  }
  int base_dim() const { return n - 1; }
  /// L = 4πγ/(n-3)
  double fiber_length() const { return 4.0 * kPi * gamma / (n - 3); }
};

/// r = u [1 + ¼ (γ/u)^{n-3}]^{2/(n-3)}
template <class S>
S isotropic_radius(const SchwarzschildParams& p, const S& u) {
  const double e = p.n - 3;
  return u * std::pow(1.0 + 0.25 * std::pow(p.gamma / u, e), 2.0 / e);
}

template <class S>
MatrixS<S> schwarzschild_frame(const SchwarzschildParams& p, Chart chart,
                               const std::vector<S>& x) {
  const double e = p.n - 3;
  const S r = norm(x);
  if (chart == Chart::AreaRadial) {
    const S V = 1.0 - std::pow(p.gamma / r, e);
    return radial_split(x, r, S(1.0) / V, V);
  }
  const S w = 0.25 * std::pow(p.gamma / r, e);
  const S psi = std::pow(1.0 + w, 4.0 / e);
  const S lapse = (1.0 - w) / (1.0 + w);
  return conformal_split(static_cast<int>(x.size()), psi, lapse * lapse);
}

inline void check_schwarzschild_domain(const SchwarzschildParams& p, Chart chart,
                                       const FramePoint& pt) {
  const double r = pt.radius();
  if (!(r > p.gamma)) {
    throw DomainError("schwarzschild: radius " + std::to_string(r) +
                      " is not outside the horizon radius " + std::to_string(p.gamma) + " (" +
                      chart_name(chart) + " chart)");
  }
  require_exterior(pt);
}

inline FrameTensor2 schwarzschild_components(const SchwarzschildParams& p, Chart chart,
                                             const FramePoint& pt) {
  check_schwarzschild_domain(p, chart, pt);
  return schwarzschild_frame<double>(p, chart, pt.x);
}

inline ModelMetric schwarzschild_model(const SchwarzschildParams& p) {
  p.validate();
  return ModelMetric::trivial(p.base_dim(), p.fiber_length());
}

inline MetricFamily schwarzschild_family(const SchwarzschildParams& p, Chart chart) {
  p.validate();
  const ModelMetric model = schwarzschild_model(p);
  MetricFamily f;
  f.name = "schwarzschild";
  f.components = [p, chart](const FramePoint& pt) { return schwarzschild_components(p, chart, pt); };
  f.exact_derivative = [p, chart, model](const FramePoint& pt) {
    check_schwarzschild_domain(p, chart, pt);
    auto comp = [&](const auto& x) { return schwarzschild_frame(p, chart, x); };
    return exact_cov_derivative(model, comp, pt);
  };
  f.decay_order = p.n - 3;
  return f;
}

struct WarpProfile {
  std::vector<double> rho;
  std::vector<double> G;
  std::vector<double> F;
};

/// Integrates G' = sqrt(1 - (γ/G)^{n-3}), G(0) = γ on [0, rho_max] with RK4.
/// G'(0) = 0, so the first step uses the series G ≈ γ + (n-3)ρ²/(4γ).
inline WarpProfile warp_profile(const SchwarzschildParams& p, double rho_max, int steps) {
  p.validate();
  if (steps < 100) throw DomainError("warp_profile: steps must be >= 100");
  if (!(rho_max > 0.0)) throw DomainError("warp_profile: rho_max must be positive");
  const double e = p.n - 3;
  const double gamma = p.gamma;
  auto rhs = [&](double G) {
    const double s = 1.0 - std::pow(gamma / G, e);
    return s > 0.0 ? std::sqrt(s) : 0.0;
  };
  const double h = rho_max / steps;
  WarpProfile out;
  out.rho.reserve(steps + 1);
  out.G.reserve(steps + 1);
  out.rho.push_back(0.0);
  out.G.push_back(gamma);
  double G = gamma + e * h * h / (4.0 * gamma);
  out.rho.push_back(h);
  out.G.push_back(G);
  for (int i = 2; i <= steps; ++i) {
    const double k1 = rhs(G);
    const double k2 = rhs(G + 0.5 * h * k1);
    const double k3 = rhs(G + 0.5 * h * k2);
    const double k4 = rhs(G + h * k3);
    const double next = G + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (!(next > G) || !std::isfinite(next)) {
      throw NonConvergenceError("warp_profile: monotonicity lost at step " + std::to_string(i) +
                                    "; use more steps",
                                out.rho, out.G);
    }
    G = next;
    out.rho.push_back(i * h);
    out.G.push_back(G);
  }
  out.F.reserve(out.G.size());
  for (double g : out.G) out.F.push_back(2.0 * gamma / e * rhs(g));
  return out;
}

// ---------------------------------------------------------------------------
// Reissner–Nordström (n = 4)

struct ReissnerNordstromParams {
  double m = 0.0;
  double q = 1.0;

  void validate() const {
    if (m <= 0.0 && q == 0.0) {
      throw DomainError(
          "reissner-nordstrom: charge q must be nonzero when the mass parameter m <= 0 "
          "(completeness)");
    }
    if (!(G0() > 0.0)) throw DomainError("reissner-nordstrom: G0 must be positive");
  }
  /// G0 = m + sqrt(m² + q²)
  double G0() const { return m + std::sqrt(m * m + q * q); }
  /// t = G0²/(G0 - m) θ with θ of period 2π.
  double fiber_length() const { return 2.0 * kPi * G0() * G0() / (G0() - m); }
  /// Smallest isotropic radius: the isotropic map reaches r = G0 at u = sqrt(m²+q²)/2.
  double isotropic_min() const { return 0.5 * std::sqrt(m * m + q * q); }
};

/// r = u [1 + m/u + (m²+q²)/(4u²)]
template <class S>
S rn_isotropic_radius(const ReissnerNordstromParams& p, const S& u) {
  return u * (1.0 + p.m / u + (p.m * p.m + p.q * p.q) / (4.0 * u * u));
}

template <class S>
MatrixS<S> rn_frame(const ReissnerNordstromParams& p, Chart chart, const std::vector<S>& x) {
  const S r = norm(x);
  if (chart == Chart::AreaRadial) {
    const S V = 1.0 - 2.0 * p.m / r - p.q * p.q / (r * r);
    return radial_split(x, r, S(1.0) / V, V);
  }
  const S c2 = (p.m * p.m + p.q * p.q) / (4.0 * r * r);
  const S phi = 1.0 + p.m / r + c2;
  const S lapse = (1.0 - c2) / phi;
  return conformal_split(static_cast<int>(x.size()), phi * phi, lapse * lapse);
}

inline void check_rn_domain(const ReissnerNordstromParams& p, Chart chart, const FramePoint& pt) {
  const double r = pt.radius();
  const double bound = chart == Chart::AreaRadial ? p.G0() : p.isotropic_min();
  if (!(r > bound)) {
    throw DomainError("reissner-nordstrom: radius " + std::to_string(r) +
                      " is not outside the bolt radius " + std::to_string(bound) + " (" +
                      chart_name(chart) + " chart)");
  }
  require_exterior(pt);
}

inline FrameTensor2 rn_components(const ReissnerNordstromParams& p, Chart chart,
                                  const FramePoint& pt) {
  check_rn_domain(p, chart, pt);
  return rn_frame<double>(p, chart, pt.x);
}

inline ModelMetric rn_model(const ReissnerNordstromParams& p) {
  p.validate();
  return ModelMetric::trivial(3, p.fiber_length());
}

inline MetricFamily rn_family(const ReissnerNordstromParams& p, Chart chart) {
  p.validate();
  const ModelMetric model = rn_model(p);
  MetricFamily f;
  f.name = "reissner-nordstrom";
  f.components = [p, chart](const FramePoint& pt) { return rn_components(p, chart, pt); };
  f.exact_derivative = [p, chart, model](const FramePoint& pt) {
    check_rn_domain(p, chart, pt);
    auto comp = [&](const auto& x) { return rn_frame(p, chart, x); };
    return exact_cov_derivative(model, comp, pt);
  };
  f.decay_order = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Taub-NUT: (1 + 2km/r) dx² + (1 + 2km/r)^{-1} η_k² over the charge-k model.

struct TaubNutParams {
  double m = 1.0;
  int k = 1;

  void validate() const {
    if (!(m > 0.0)) throw DomainError("taub-nut: mass parameter must be positive");
    if (k < 1) throw DomainError("taub-nut: monopole charge k must be >= 1");
  }
  /// L = 8πm makes dη = 2km × area form, the Gibbons–Hawking relation dη = ±*dV.
  double fiber_length() const { return 8.0 * kPi * m; }
};

template <class S>
MatrixS<S> taubnut_frame(const TaubNutParams& p, const std::vector<S>& x) {
  const S r = norm(x);
  const S V = 1.0 + 2.0 * p.k * p.m / r;
  return conformal_split(static_cast<int>(x.size()), V, S(1.0) / V);
}

inline FrameTensor2 taubnut_components(const TaubNutParams& p, const FramePoint& pt) {
  require_exterior(pt);
  return taubnut_frame<double>(p, pt.x);
}

inline ModelMetric taubnut_model(const TaubNutParams& p) {
  p.validate();
  return ModelMetric::hopf(p.k, p.fiber_length());
}

inline MetricFamily taubnut_family(const TaubNutParams& p) {
  p.validate();
  const ModelMetric model = taubnut_model(p);
  MetricFamily f;
  f.name = "taub-nut";
  f.components = [p](const FramePoint& pt) { return taubnut_components(p, pt); };
  f.exact_derivative = [p, model](const FramePoint& pt) {
    require_exterior(pt);
    auto comp = [&](const auto& x) { return taubnut_frame(p, x); };
    return exact_cov_derivative(model, comp, pt);
  };
  f.decay_order = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Registry

/// A metric family together with the model it is asymptotic to.
struct AlfMetric {
  std::string family;
  std::map<std::string, double> params;
  std::string chart;
  ModelMetric model;
  MetricFamily metric;
};

using ParamMap = std::map<std::string, double>;

inline const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names{"flat", "schwarzschild", "reissner-nordstrom",
                                              "taub-nut"};
  return names;
}

/// Looks up a required parameter, naming it in the error when missing.
inline double require_param(const ParamMap& params, const std::string& key,
                            const std::string& family) {
  const auto it = params.find(key);
  if (it == params.end())
    throw ConfigError(key, "family '" + family + "' requires parameter '" + key + "'");
  return it->second;
}

inline double param_or(const ParamMap& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

inline int integer_param(double v, const std::string& key) {
  if (std::abs(v - std::round(v)) > 1e-12)
    throw ConfigError(key, "parameter '" + key + "' must be an integer");
  return static_cast<int>(std::lround(v));
}

/// Builds a registered family. Keys: flat {m, fiber-length, monopole-k}; schwarzschild
/// {n, gamma}; reissner-nordstrom {mass-param, charge}; taub-nut {mass-param,
/// monopole-k}. `chart` is "isotropic" (default) or "area".
inline AlfMetric make_metric(const std::string& name, const ParamMap& params,
                             const std::string& chart = "isotropic") {
  Chart c;
  if (chart == "isotropic") {
    c = Chart::Isotropic;
  } else if (chart == "area") {
    c = Chart::AreaRadial;
  } else {
    throw ConfigError("chart", "unknown chart '" + chart + "' (expected isotropic or area)");
  }
  try {
    if (name == "flat") {
      const int m = integer_param(param_or(params, "m", 3.0), "m");
      const double L = param_or(params, "fiber-length", 2.0 * kPi);
      const int k = integer_param(param_or(params, "monopole-k", 0.0), "monopole-k");
      if (k < 0) throw ConfigError("monopole-k", "flat: monopole charge must be >= 0");
      if (k > 0 && m != 3) throw ConfigError("m", "flat: the Hopf model requires m = 3");
      const ModelMetric model = k > 0 ? ModelMetric::hopf(k, L) : ModelMetric::trivial(m, L);
      ParamMap used{{"m", double(m)}, {"fiber-length", L}};
      if (k > 0) used["monopole-k"] = k;
      return {name, used, chart, model, flat_family(model)};
    }
    if (name == "schwarzschild") {
      SchwarzschildParams p;
      p.n = integer_param(require_param(params, "n", name), "n");
      p.gamma = require_param(params, "gamma", name);
      if (p.n < 4) throw ConfigError("n", "schwarzschild: n must be >= 4");
      if (!(p.gamma > 0.0)) throw ConfigError("gamma", "schwarzschild: gamma must be positive");
      return {name,
              {{"n", double(p.n)}, {"gamma", p.gamma}},
              chart,
              schwarzschild_model(p),
              schwarzschild_family(p, c)};
    }
    if (name == "reissner-nordstrom") {
      ReissnerNordstromParams p;
      p.m = require_param(params, "mass-param", name);
      p.q = require_param(params, "charge", name);
      if (p.m <= 0.0 && p.q == 0.0)
        throw ConfigError("charge",
                          "reissner-nordstrom: charge q must be nonzero when the mass parameter "
                          "m <= 0 (completeness)");
      return {name, {{"mass-param", p.m}, {"charge", p.q}}, chart, rn_model(p), rn_family(p, c)};
    }
    if (name == "taub-nut") {
      TaubNutParams p;
      p.m = require_param(params, "mass-param", name);
      p.k = integer_param(param_or(params, "monopole-k", 1.0), "monopole-k");
      if (!(p.m > 0.0)) throw ConfigError("mass-param", "taub-nut: mass parameter must be positive");
      if (p.k < 1) throw ConfigError("monopole-k", "taub-nut: monopole charge must be >= 1");
      return {name,
              {{"mass-param", p.m}, {"monopole-k", double(p.k)}},
              "hopf-frame",
              taubnut_model(p),
              taubnut_family(p)};
    }
  } catch (const DomainError& e) {
    throw ConfigError("params", e.what());
  }
  throw ConfigError("family", "unknown family '" + name + "'");
}

}  // namespace alf::zoo
