#pragma once

// Gauss–Bonnet and Dirac masses: radial components of the mass one-forms,
// boundary integrals over ∂B_R = S^{m-1}(R) × S^1, and extrapolation R -> ∞.
//
// Conventions: Div_h g = -Σ_a (∇^h_{e_a} g)(e_a, ·), Tr_h g = Σ_a g(e_a, e_a).
// The mass one-forms are
//   GB:    -(Div_h g + d Tr_h g - ½ d g(T,T))
//   Dirac: -(Div_h0 g + d Tr_h0 g)            (trivial fibration only)
// and the masses are (1/(ω_m L)) lim ∫_{∂B_R} ξ(∂_r) dA_h.

#include <cmath>
#include <string>
#include <vector>

#include "alf/extrapolation.hpp"
#include "alf/geometry.hpp"
#include "alf/metric_zoo.hpp"
#include "alf/quadrature.hpp"

namespace alf {

struct RadiusSchedule {
  double r0 = 16.0;
  double growth = 2.0;
  int count = 6;

  void validate() const {
    if (!(r0 > 1.0)) throw DomainError("schedule: r0 must be > 1");
    if (!(growth > 1.0)) throw DomainError("schedule: growth must be > 1");
    if (count < 3) throw DomainError("schedule: count must be >= 3");
  }
  std::vector<double> radii() const {
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i) r[i] = r0 * std::pow(growth, i);
    return r;
  }
};

struct MassOptions {
  DerivativeMode derivative = DerivativeMode::Auto;
  /// Finite-difference step relative to max(r, 1).
  double fd_step = 1e-4;
  unsigned workers = 1;
  /// Fit RMS above this fraction of the spread of the per-radius values is
  /// reported as non-convergence.
  double residual_tolerance = 1e-2;
};

enum class MassKind { GaussBonnet, Dirac };

inline std::string mass_kind_name(MassKind k) { return k == MassKind::GaussBonnet ? "gb" : "dirac"; }

struct MassReport {
  MassKind kind = MassKind::GaussBonnet;
  std::string family;
  std::vector<double> radii;
  std::vector<double> values;
  double extrapolated = 0.0;
  double fit_order = 0.0;
  double residual = 0.0;
  double aitken = 0.0;
  std::string method = "power-law";
  int base_dim = 3;
  double fiber_length = 0.0;
  std::string fibration = "trivial";
  double sphere_area = 0.0;
};

struct MassQuadraticForm {
  Matrix matrix;
  Matrix residual;
  std::vector<double> radii;
  std::vector<Matrix> per_radius;
  double trace() const { return matrix.trace(); }
};

// ---------------------------------------------------------------------------
// Pointwise integrands

/// Ingredients of the mass one-forms at one point, all in the adapted frame.
struct MassTerms {
  Matrix g;
  CovDerivTensor cov;
  /// e_c(g_ab)
  std::vector<Matrix> directional;
  /// (Div_h g)(e_b)
  Vector div;
  /// e_c(Tr_h g)
  Vector dtrace;
  /// Unit radial direction on the base.
  Vector normal;
};

inline MassTerms mass_terms(const ModelMetric& model, const MetricFamily& family,
                            const FramePoint& p0, const MassOptions& opt = {}) {
  const FramePoint p = regular_patch(model, p0);
  require_exterior(p);
  const int m = model.base_dim();
  const int n = m + 1;
  MassTerms t;
  t.g = family.components(p);
  require_finite(t.g, p, "metric");
  t.cov = covariant_derivative_metric(model, family, p, opt.fd_step * std::max(p.radius(), 1.0),
                                      opt.derivative);
  t.directional = directional_from_covariant(frame_connection_coeffs(model, p), t.g, t.cov);
  t.div = Vector::Zero(n);
  t.dtrace = Vector::Zero(n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) t.div[b] -= t.cov.dir[a](a, b);
  for (int c = 0; c < n; ++c) t.dtrace[c] = t.cov.dir[c].trace();
  const double r = p.radius();
  t.normal = Vector::Zero(m);
  for (int i = 0; i < m; ++i) t.normal[i] = p.x[i] / r;
  return t;
}

/// ∂_r-component of -(Div_h g + d Tr_h g - ½ d g(T,T)).
inline double gb_integrand_radial(const ModelMetric& model, const MetricFamily& family,
                                  const FramePoint& p, const MassOptions& opt = {}) {
  const MassTerms t = mass_terms(model, family, p, opt);
  const int m = model.base_dim();
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    s -= t.normal[i] * (t.div[i] + t.dtrace[i] - 0.5 * t.directional[i](m, m));
  return s;
}

/// ∂_r-component of -(Div_h0 g + d Tr_h0 g); defined for the trivial fibration only.
inline double dirac_integrand_radial(const ModelMetric& model, const MetricFamily& family,
                                     const FramePoint& p, const MassOptions& opt = {}) {
  if (!model.is_trivial())
    throw UnsupportedModelError("the Dirac mass is defined only for the trivial fibration");
  const MassTerms t = mass_terms(model, family, p, opt);
  const int m = model.base_dim();
  double s = 0.0;
  for (int i = 0; i < m; ++i) s -= t.normal[i] * (t.div[i] + t.dtrace[i]);
  return s;
}

/// Simplified GB one-form [X_j g(X_i,X_j) - X_i g(X_j,X_j)] dx_i - ½ d g(T,T),
/// obtained by dropping the (∇_T g)(X_i, T) term and connection corrections.
inline double gb_integrand_simplified_radial(const ModelMetric& model, const MetricFamily& family,
                                             const FramePoint& p, const MassOptions& opt = {}) {
  const MassTerms t = mass_terms(model, family, p, opt);
  const int m = model.base_dim();
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    double xi = -0.5 * t.directional[i](m, m);
    for (int j = 0; j < m; ++j) xi += t.directional[j](i, j) - t.directional[i](j, j);
    s += t.normal[i] * xi;
  }
  return s;
}

/// Radial components of the mass quadratic form density q_{g,h}, polarized:
/// B_ij = -½(Div_i n_j + Div_j n_i) - ¼(dTr_i n_j + dTr_j n_i) - ½ ∂_r g_ij.
inline Matrix quadratic_form_density(const ModelMetric& model, const MetricFamily& family,
                                     const FramePoint& p, const MassOptions& opt = {}) {
  const MassTerms t = mass_terms(model, family, p, opt);
  const int m = model.base_dim();
  Matrix B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double dr_gij = 0.0;
      for (int c = 0; c < m; ++c) dr_gij += t.normal[c] * t.directional[c](i, j);
      B(i, j) = -0.5 * (t.div[i] * t.normal[j] + t.div[j] * t.normal[i]) -
                0.25 * (t.dtrace[i] * t.normal[j] + t.dtrace[j] * t.normal[i]) - 0.5 * dr_gij;
    }
  return B;
}

// ---------------------------------------------------------------------------
// Boundary integrals

/// ∫_{S^{m-1}(R) × S^1} f dA_h for a vector-valued integrand of length `width`.
/// Node values are computed (possibly in parallel) into a buffer and reduced
/// pairwise in a fixed order, so the result does not depend on `workers`.
template <class F>
Vector boundary_integral_vec(const F& integrand, int width, const ModelMetric& model, double R,
                             const QuadratureSpec& quad, unsigned workers = 1) {
  quad.validate();
  if (!(R > 1.0)) throw DomainError("boundary_integral: radius must be > 1");
  const int m = model.base_dim();
  const SphereRule sphere = sphere_rule(m, quad.polar_nodes, quad.azimuth_nodes);
  const double L = model.fiber_length();
  const std::size_t ns = sphere.points.size();
  const std::size_t nf = static_cast<std::size_t>(quad.fiber_nodes);
  const std::size_t total = ns * nf;
  std::vector<Vector> vals(total);
  std::vector<std::string> bad(total);
  parallel_for(total, workers, [&](std::size_t idx) {
    const std::size_t is = idx / nf;
    const std::size_t it = idx % nf;
    std::vector<double> x(m);
    for (int k = 0; k < m; ++k) x[k] = R * sphere.points[is][k];
    const FramePoint p = make_point(std::move(x), L * static_cast<double>(it) / static_cast<double>(nf));
    Vector v = integrand(p);
    if (!v.allFinite()) bad[idx] = describe(p);
    vals[idx] = std::move(v);
  });
  for (std::size_t idx = 0; idx < total; ++idx)
    if (!bad[idx].empty()) throw NumericError("boundary_integral: non-finite integrand at " + bad[idx]);
  const double area = std::pow(R, m - 1) * (L / static_cast<double>(nf));
  Vector out(width);
  std::vector<double> terms(total);
  for (int c = 0; c < width; ++c) {
    for (std::size_t idx = 0; idx < total; ++idx) terms[idx] = sphere.weights[idx / nf] * vals[idx][c];
    out[c] = area * pairwise_sum(terms);
  }
  return out;
}

template <class F>
double boundary_integral(const F& integrand, const ModelMetric& model, double R,
                         const QuadratureSpec& quad, unsigned workers = 1) {
  auto wrapped = [&](const FramePoint& p) {
    Vector v(1);
    v[0] = integrand(p);
    return v;
  };
  return boundary_integral_vec(wrapped, 1, model, R, quad, workers)[0];
}

// ---------------------------------------------------------------------------
// Extrapolated masses

namespace detail {

inline void check_tail(const std::vector<double>& radii, const std::vector<double>& values,
                       const std::string& what) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double floor = 1e-11 * (1.0 + scale);
  // Differences must not change sign once they are above rounding.
  int sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) <= floor) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) {
      throw NonConvergenceError(what + ": per-radius values oscillate; the limit is not resolved",
                                radii, values);
    }
    sign = s;
  }
}

inline void extrapolate_into(MassReport& rep, int m, const MassOptions& opt) {
  const std::string what = "mass_" + mass_kind_name(rep.kind);
  check_tail(rep.radii, rep.values, what);
  const double p_init = m - 2.0;
  const PowerLawFit fit = fit_power_law(rep.radii, rep.values, p_init, 0.5, 2.0 * (m - 2.0));
  double spread = 0.0;
  for (double v : rep.values) spread = std::max(spread, std::abs(v - rep.values.back()));
  rep.aitken = aitken_limit(rep.values);
  if (fit.degenerate) {
    rep.extrapolated = fit.limit;
    rep.fit_order = fit.order;
    rep.residual = 0.0;
    rep.method = "constant";
    return;
  }
  const bool pinned = std::abs(fit.order - 0.5) < 1e-6 || std::abs(fit.order - 2.0 * (m - 2.0)) < 1e-6;
  if (pinned) {
    // Order hit the constraint: the free fit is ill-conditioned, fall back to
    // fixed-order Richardson with the expected order m - 2.
    rep.extrapolated = richardson_limit(rep.radii, rep.values, p_init);
    rep.fit_order = p_init;
    rep.residual = std::abs(rep.extrapolated - fit.limit);
    rep.method = "richardson";
  } else {
    rep.extrapolated = fit.limit;
    rep.fit_order = fit.order;
    rep.residual = fit.rms;
    rep.method = "power-law";
  }
  if (!(rep.residual <= opt.residual_tolerance * spread + 1e-13 * (1.0 + std::abs(rep.extrapolated)))) {
    throw NonConvergenceError(what + ": fit residual " + std::to_string(rep.residual) +
                                  " exceeds tolerance",
                              rep.radii, rep.values);
  }
}

template <class Integrand>
MassReport mass_from_integrand(MassKind kind, const ModelMetric& model, const MetricFamily& family,
                               const RadiusSchedule& schedule, const QuadratureSpec& quad,
                               const MassOptions& opt, const Integrand& integrand) {
  schedule.validate();
  quad.validate();
  const int m = model.base_dim();
  MassReport rep;
  rep.kind = kind;
  rep.family = family.name;
  rep.base_dim = m;
  rep.fiber_length = model.fiber_length();
  rep.fibration = model.fibration_name();
  rep.sphere_area = sphere_area(m);
  rep.radii = schedule.radii();
  const double norm = 1.0 / (rep.sphere_area * rep.fiber_length);
  for (double R : rep.radii)
    rep.values.push_back(norm * boundary_integral(integrand, model, R, quad, opt.workers));
  extrapolate_into(rep, m, opt);
  return rep;
}

}  // namespace detail

inline MassReport mass_gb(const ModelMetric& model, const MetricFamily& family,
                          const RadiusSchedule& schedule, const QuadratureSpec& quad,
                          const MassOptions& opt = {}) {
  auto f = [&](const FramePoint& p) { return gb_integrand_radial(model, family, p, opt); };
  return detail::mass_from_integrand(MassKind::GaussBonnet, model, family, schedule, quad, opt, f);
}

inline MassReport mass_dirac(const ModelMetric& model, const MetricFamily& family,
                             const RadiusSchedule& schedule, const QuadratureSpec& quad,
                             const MassOptions& opt = {}) {
  if (!model.is_trivial())
    throw UnsupportedModelError("the Dirac mass is defined only for the trivial fibration");
  auto f = [&](const FramePoint& p) { return dirac_integrand_radial(model, family, p, opt); };
  return detail::mass_from_integrand(MassKind::Dirac, model, family, schedule, quad, opt, f);
}

inline MassReport mass_gb(const zoo::AlfMetric& g, const RadiusSchedule& s, const QuadratureSpec& q,
                          const MassOptions& opt = {}) {
  return mass_gb(g.model, g.metric, s, q, opt);
}

inline MassReport mass_dirac(const zoo::AlfMetric& g, const RadiusSchedule& s,
                             const QuadratureSpec& q, const MassOptions& opt = {}) {
  return mass_dirac(g.model, g.metric, s, q, opt);
}

/// Entrywise extrapolation of (1/(ω_m L)) ∫ q_{g,h}; Tr equals the GB mass.
inline MassQuadraticForm mass_quadratic_form(const ModelMetric& model, const MetricFamily& family,
                                             const RadiusSchedule& schedule,
                                             const QuadratureSpec& quad,
                                             const MassOptions& opt = {}) {
  schedule.validate();
  const int m = model.base_dim();
  const int width = m * m;
  auto f = [&](const FramePoint& p) {
    const Matrix B = quadratic_form_density(model, family, p, opt);
    return Vector(Eigen::Map<const Vector>(B.data(), width));
  };
  MassQuadraticForm out;
  out.radii = schedule.radii();
  const double norm = 1.0 / (sphere_area(m) * model.fiber_length());
  for (double R : out.radii) {
    const Vector v = norm * boundary_integral_vec(f, width, model, R, quad, opt.workers);
    out.per_radius.push_back(Eigen::Map<const Matrix>(v.data(), m, m));
  }
  out.matrix = Matrix::Zero(m, m);
  out.residual = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      MassReport rep;
      rep.kind = MassKind::GaussBonnet;
      rep.radii = out.radii;
      for (const auto& Q : out.per_radius) rep.values.push_back(0.5 * (Q(i, j) + Q(j, i)));
      detail::extrapolate_into(rep, m, opt);
      out.matrix(i, j) = out.matrix(j, i) = rep.extrapolated;
      out.residual(i, j) = out.residual(j, i) = rep.residual;
    }
  return out;
}

struct InvarianceReport {
  MassKind kind = MassKind::GaussBonnet;
  MassReport first;
  MassReport second;
  double discrepancy = 0.0;
};

/// Masses of one metric presented in two charts (or against two models).
inline InvarianceReport chart_invariance_check(const zoo::AlfMetric& a, const zoo::AlfMetric& b,
                                               const RadiusSchedule& schedule,
                                               const QuadratureSpec& quad,
                                               MassKind kind = MassKind::GaussBonnet,
                                               const MassOptions& opt = {}) {
  InvarianceReport out;
  out.kind = kind;
  if (kind == MassKind::GaussBonnet) {
    out.first = mass_gb(a, schedule, quad, opt);
    out.second = mass_gb(b, schedule, quad, opt);
  } else {
    out.first = mass_dirac(a, schedule, quad, opt);
    out.second = mass_dirac(b, schedule, quad, opt);
  }
  out.discrepancy = std::abs(out.first.extrapolated - out.second.extrapolated);
  return out;
}

}  // namespace alf
