#pragma once

// Limits R -> ∞ of sequences sampled on a geometric radius ladder.

#include <boost/math/tools/minima.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "alf/errors.hpp"

namespace alf {

struct PowerLawFit {
  double limit = 0.0;
  double coefficient = 0.0;
  double order = 0.0;
  /// Coefficient of the secondary term R^{-2p} (zero for the one-term fit).
  double coefficient2 = 0.0;
  /// RMS of the fit residuals.
  double rms = 0.0;
  int terms = 1;
  bool degenerate = false;
};

namespace detail {

/// Linear least squares for μ + Σ_k c_k R^{-k p}, k = 1..terms, at fixed p;
/// returns the RMS residual.
inline double fit_fixed_order(std::span<const double> radii, std::span<const double> values,
                              double p, int terms, PowerLawFit* out) {
  const int n = static_cast<int>(radii.size());
  Eigen::MatrixXd A(n, terms + 1);
  Eigen::VectorXd b(n);
  const double r0 = radii.front();
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (int k = 1; k <= terms; ++k) A(i, k) = std::pow(radii[i] / r0, -k * p);
    b[i] = values[i];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((A * x - b).squaredNorm() / n);
  if (out) {
    out->limit = x[0];
    out->coefficient = x[1] * std::pow(r0, p);
    out->coefficient2 = terms > 1 ? x[2] * std::pow(r0, 2.0 * p) : 0.0;
    out->order = p;
    out->rms = rms;
    out->terms = terms;
  }
  return rms;
}

}  // namespace detail

/// Fits value(R) = μ + c R^{-p} (+ c_2 R^{-2p} when at least five samples are
/// given) with p ∈ [p_lo, p_hi]. For fixed p the problem is linear; p is found
/// by a coarse scan followed by Brent refinement.
inline PowerLawFit fit_power_law(std::span<const double> radii, std::span<const double> values,
                                 double p_init, double p_lo, double p_hi) {
  if (radii.size() != values.size() || radii.size() < 3)
    throw DomainError("fit_power_law: need at least three (R, value) pairs");
  PowerLawFit out;
  double vmin = values[0], vmax = values[0];
  for (double v : values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax - vmin <= 1e-14 * (1.0 + std::abs(vmax))) {
    out.limit = values.back();
    out.order = p_init;
    out.degenerate = true;
    return out;
  }
  const int terms = radii.size() >= 5 ? 2 : 1;
  auto objective = [&](double p) { return detail::fit_fixed_order(radii, values, p, terms, nullptr); };
  const int scan = 64;
  double best_p = p_init;
  double best = objective(p_init);
  for (int i = 0; i <= scan; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / scan;
    const double f = objective(p);
    if (f < best) {
      best = f;
      best_p = p;
    }
  }
  const double width = (p_hi - p_lo) / scan;
  const double lo = std::max(p_lo, best_p - width);
  const double hi = std::min(p_hi, best_p + width);
  const auto res = boost::math::tools::brent_find_minima(objective, lo, hi, 52);
  const double p = res.second <= best ? res.first : best_p;
  detail::fit_fixed_order(radii, values, p, terms, &out);
  return out;
}

/// Richardson extrapolation of the last two values assuming error ∝ R^{-p}.
inline double richardson_limit(std::span<const double> radii, std::span<const double> values,
                               double p) {
  const std::size_t n = values.size();
  if (n < 2) throw DomainError("richardson_limit: need two values");
  const double ratio = std::pow(radii[n - 1] / radii[n - 2], p);
  return (ratio * values[n - 1] - values[n - 2]) / (ratio - 1.0);
}

/// Aitken Δ² limit of the last three values.
inline double aitken_limit(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw DomainError("aitken_limit: need three values");
  const double a = values[n - 3], b = values[n - 2], c = values[n - 1];
  const double denom = (c - b) - (b - a);
  if (std::abs(denom) < std::numeric_limits<double>::min() * 1e3) return c;
  return c - (c - b) * (c - b) / denom;
}

}  // namespace alf
