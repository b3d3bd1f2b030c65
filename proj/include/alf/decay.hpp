#pragma once

// Decay jumps: a harmonic field in L²_δ differs from an L²_{δ'} field by
// finitely many profiles r^{ν_j^±} φ_j. Amplitudes are read off by projecting
// the fiber mean onto zonal harmonics at a few radii and fitting the two
// indicial powers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "alf/geometry.hpp"
#include "alf/modes.hpp"
#include "alf/quadrature.hpp"

namespace alf {

struct DecayTerm {
  int j = 0;
  /// +1 for r^{ν_j^+}, -1 for r^{ν_j^-}.
  int sign = 1;
  double coefficient = 0.0;
};

struct DecayExpansion {
  std::vector<DecayTerm> terms;
  /// Fitted power of the remainder's size, log|rem| ~ rate · log r.
  double remainder_rate = 0.0;
  /// Fitted slope of log|rem| against r (exponential decay rate).
  double exponential_slope = 0.0;
  /// True when the remainder is at rounding level on every sampled radius.
  bool remainder_vanishes = false;
  std::vector<double> radii;
  std::vector<double> remainder;
  double harmonic_residual = 0.0;
};

struct DecayOptions {
  double base_radius = 2.0;
  QuadratureSpec quad{16, 16, 16};
  /// Coefficients below this fraction of the largest field sample are dropped.
  double drop_tolerance = 1e-9;
  double max_condition = 1e8;
  double harmonic_tolerance = 1e-3;
};

namespace detail {

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    mx += x[q] / n;
    my += y[q] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    sxy += (x[q] - mx) * (y[q] - my);
    sxx += (x[q] - mx) * (x[q] - mx);
  }
  return sxy / sxx;
}

/// Largest |Δ_h u| relative to the size of its second-difference terms, with
/// a rounding floor from the sampled values.
inline double harmonic_check(const ModelMetric& model, const ScalarField& u, const std::vector<double>& radii) {
  const int m = model.base_dim();
  double worst = 0.0;
  for (double r : radii) {
    for (int q = 0; q < 3; ++q) {
      std::vector<double> x(m, 0.0);
      // A few generic directions.
      const double a = 0.3 + 0.9 * q;
      x[0] = std::cos(a);
      x[1] = std::sin(a) * 0.8;
      x[m - 1] = std::sin(a) * 0.6;
      double nx = 0.0;
      for (double v : x) nx += v * v;
      nx = std::sqrt(nx);
      for (double& v : x) v *= r / nx;
      const FramePoint p = make_point(x, 0.1 * model.fiber_length() * (q + 1));
      const double h = 1e-3 * std::min(r, model.fiber_length());
      const double lap = model_laplacian(model, u, p, h);
      double scale = 0.0, floor = 0.0;
      const double u0 = u(p);
      for (int c = 0; c <= m; ++c) {
        FramePoint pp = p, pm = p;
        if (c < m) {
          pp.x[c] += h;
          pm.x[c] -= h;
        } else {
          pp.t += h;
          pm.t -= h;
        }
        const double up = u(pp), um = u(pm);
        scale += std::abs(up + um - 2.0 * u0);
        floor += std::abs(up) + std::abs(um) + 2.0 * std::abs(u0);
      }
      scale = (scale + 1e-8 * floor) / (h * h);
      if (scale > 0.0) worst = std::max(worst, std::abs(lap) / scale);
    }
  }
  return worst;
}

}  // namespace detail

/// Leading profiles of `u` (harmonic outside a compact set on the trivial
/// model) whose weights lie in the window (δ', δ), for j ≤ j_max.
inline DecayExpansion decay_jump_expand(const ModelMetric& model, const ScalarField& u, double delta,
                                        double delta_prime, int j_max, const DecayOptions& opt = {}) {
  const int m = model.base_dim();
  if (!model.is_trivial()) throw UnsupportedModelError("decay_jump_expand: trivial fibration only");
  if (!(delta > delta_prime)) throw DomainError("decay_jump_expand: need δ > δ'");
  if (is_critical(delta, m) || is_critical(delta_prime, m))
    throw DomainError("decay_jump_expand: δ and δ' must be non-critical");
  if (j_max < 0) throw DomainError("decay_jump_expand: j_max must be >= 0");
  opt.quad.validate();

  DecayExpansion out;
  for (int q = 0; q < 4; ++q) out.radii.push_back(opt.base_radius * std::pow(2.0, q));
  out.harmonic_residual = detail::harmonic_check(model, u, out.radii);
  if (out.harmonic_residual > opt.harmonic_tolerance)
    throw DomainError("decay_jump_expand: field is not harmonic (relative Laplacian " +
                      std::to_string(out.harmonic_residual) + ")");

  const SphereRule sphere = sphere_rule(m, opt.quad.polar_nodes, opt.quad.azimuth_nodes);
  const int nf = opt.quad.fiber_nodes;
  const double L = model.fiber_length();
  const std::size_t ns = sphere.points.size();
  const int nr = static_cast<int>(out.radii.size());

  // Fiber means at every sphere node and radius.
  std::vector<std::vector<double>> mean(nr, std::vector<double>(ns));
  std::vector<std::vector<std::vector<double>>> full(nr, std::vector<std::vector<double>>(ns));
  double top = 0.0;
  for (int q = 0; q < nr; ++q)
    for (std::size_t i = 0; i < ns; ++i) {
      std::vector<double> samples(nf);
      for (int f = 0; f < nf; ++f) {
        std::vector<double> x(m);
        for (int c = 0; c < m; ++c) x[c] = out.radii[q] * sphere.points[i][c];
        samples[f] = u(make_point(x, L * f / nf));
        if (!std::isfinite(samples[f])) throw NumericError("decay_jump_expand: non-finite field sample");
        top = std::max(top, std::abs(samples[f]));
      }
      mean[q][i] = fiber_mean(samples);
      full[q][i] = std::move(samples);
    }

  // Retained profiles, evaluated on the sample set for the remainder.
  std::vector<std::vector<double>> retained(nr, std::vector<double>(ns, 0.0));
  for (int j = 0; j <= j_max; ++j) {
    const IndicialData d = indicial_data(j, m);
    std::vector<double> zon(ns);
    double zz = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      zon[i] = zonal_harmonic(j, m, sphere.points[i][0]);
      zz += sphere.weights[i] * zon[i] * zon[i];
    }
    std::vector<double> nus;
    std::vector<int> signs;
    if (delta_prime < d.delta_j && d.delta_j < delta) {
      nus.push_back(d.nu_plus);
      signs.push_back(1);
    }
    if (delta_prime < 2.0 - d.delta_j && 2.0 - d.delta_j < delta) {
      nus.push_back(d.nu_minus);
      signs.push_back(-1);
    }
    if (nus.empty()) continue;

    Eigen::VectorXd amp(nr);
    for (int q = 0; q < nr; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < ns; ++i) s += sphere.weights[i] * mean[q][i] * zon[i];
      amp[q] = s / zz;
    }
    const int nc = static_cast<int>(nus.size());
    Eigen::MatrixXd A(nr, nc);
    for (int q = 0; q < nr; ++q)
      for (int c = 0; c < nc; ++c) A(q, c) = std::pow(out.radii[q] / out.radii[0], nus[c]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    const double cond = sv[0] / sv[nc - 1];
    if (!(cond < opt.max_condition))
      throw IllPosedWindowError("decay_jump_expand: amplitude fit for j=" + std::to_string(j) +
                                " has condition number " + std::to_string(cond));
    const Eigen::VectorXd c = svd.solve(amp);
    for (int k = 0; k < nc; ++k) {
      const double coeff = c[k] * std::pow(out.radii[0], -nus[k]);
      if (std::abs(c[k]) <= opt.drop_tolerance * top) continue;
      out.terms.push_back({j, signs[k], coeff});
      for (int q = 0; q < nr; ++q)
        for (std::size_t i = 0; i < ns; ++i)
          retained[q][i] += coeff * std::pow(out.radii[q], nus[k]) * zon[i];
    }
  }

  // Remainder size per radius (max over sphere and fiber samples).
  std::vector<double> logr, logrem, rs;
  for (int q = 0; q < nr; ++q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
      for (int f = 0; f < nf; ++f) worst = std::max(worst, std::abs(full[q][i][f] - retained[q][i]));
    out.remainder.push_back(worst);
  }
  const double floor = 1e-13 * std::max(top, std::numeric_limits<double>::min());
  bool all_small = true;
  for (double v : out.remainder) all_small = all_small && v <= floor;
  out.remainder_vanishes = all_small;
  if (all_small) {
    out.remainder_rate = -std::numeric_limits<double>::infinity();
    out.exponential_slope = -std::numeric_limits<double>::infinity();
    return out;
  }
  for (int q = 0; q < nr; ++q) {
    if (out.remainder[q] <= 0.0) continue;
    logr.push_back(std::log(out.radii[q]));
    rs.push_back(out.radii[q]);
    logrem.push_back(std::log(out.remainder[q]));
  }
  if (logr.size() < 2) {
    out.remainder_rate = -std::numeric_limits<double>::infinity();
    out.exponential_slope = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.remainder_rate = detail::fit_slope(logr, logrem);
  out.exponential_slope = detail::fit_slope(rs, logrem);
  return out;
}

// ---------------------------------------------------------------------------
// Harmonic test fields on the trivial model.

/// c · r^{ν} · zonal_j(x_1 / r), with ν one of the indicial roots.
inline ScalarField indicial_field(int m, int j, int sign, double c) {
  const auto [nup, num] = indicial_roots(j, m);
  const double nu = sign > 0 ? nup : num;
  return [=](const FramePoint& p) {
    const double r = p.radius();
    return c * std::pow(r, nu) * zonal_harmonic(j, m, p.x[0] / r);
  };
}

/// c · r^{1-m/2} K_{j+m/2-1}(κ r) · zonal_j(x_1/r) · cos(κ t), κ = 2πk/L:
/// harmonic on the fiber mode k ≥ 1 and exponentially decaying.
inline ScalarField fiber_mode_field(int m, int j, int k, double L, double c) {
  if (k < 1) throw DomainError("fiber_mode_field: k must be >= 1");
  const double kappa = 2.0 * kPi * k / L;
  const double order = j + 0.5 * m - 1.0;
  return [=](const FramePoint& p) {
    const double r = p.radius();
    return c * std::pow(r, 1.0 - 0.5 * m) * std::cyl_bessel_k(order, kappa * r) *
           zonal_harmonic(j, m, p.x[0] / r) * std::cos(kappa * p.t);
  };
}

inline ScalarField sum_fields(std::vector<ScalarField> parts) {
  return [parts = std::move(parts)](const FramePoint& p) {
    double s = 0.0;
    for (const auto& f : parts) s += f(p);
    return s;
  };
}

}  // namespace alf
