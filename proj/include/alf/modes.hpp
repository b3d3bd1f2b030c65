#pragma once

// Separation of variables on the exterior model: spherical eigenvalues,
// indicial roots, critical weights, fiber Fourier projection, zonal harmonics.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "alf/errors.hpp"
#include "alf/numeric.hpp"

namespace alf {

struct IndicialData {
  int j = 0;
  int m = 3;
  double lambda_j = 0.0;
  double delta_j = 0.0;
  double nu_plus = 0.0;
  double nu_minus = 0.0;
};

inline void require_mode(int j, int m) {
  if (j < 0) throw DomainError("mode index j must be >= 0");
  if (m < 3) throw DomainError("base dimension must be >= 3");
}

/// Eigenvalue of the Laplacian of S^{m-1} on degree-j harmonics.
inline double sphere_eigenvalue(int j, int m) {
  require_mode(j, m);
  return static_cast<double>(j) * (m - 2 + j);
}

/// (ν⁺, ν⁻) = (j, 2 - m - j): r^ν φ_j is harmonic for φ_j of degree j.
inline std::pair<double, double> indicial_roots(int j, int m) {
  require_mode(j, m);
  return {static_cast<double>(j), static_cast<double>(2 - m - j)};
}

inline double critical_weight(int j, int m) {
  require_mode(j, m);
  return 0.5 * m + j;
}

inline IndicialData indicial_data(int j, int m) {
  IndicialData d;
  d.j = j;
  d.m = m;
  d.lambda_j = sphere_eigenvalue(j, m);
  d.delta_j = critical_weight(j, m);
  std::tie(d.nu_plus, d.nu_minus) = indicial_roots(j, m);
  return d;
}

/// {δ_j} ∪ {2 - δ_j} for j ≤ j_max, ascending.
inline std::vector<double> critical_set(int m, int j_max) {
  if (j_max < 0) throw DomainError("critical_set: j_max must be >= 0");
  std::vector<double> out;
  for (int j = 0; j <= j_max; ++j) {
    out.push_back(critical_weight(j, m));
    out.push_back(2.0 - critical_weight(j, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline constexpr double kCriticalTolerance = 1e-9;

/// True when δ is within `tol` of some δ_j or 2 - δ_j (all j ≥ 0).
inline bool is_critical(double delta, int m, double tol = kCriticalTolerance) {
  const double half = 0.5 * m;
  for (double c : {delta, 2.0 - delta}) {
    const double j = std::round(c - half);
    if (j >= 0.0 && std::abs(c - half - j) < tol) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Fiber Fourier projection on equispaced samples t_n = nL/N.

struct FiberAmplitude {
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

inline FiberAmplitude fiber_project(std::span<const double> samples, int k) {
  if (k < 0) throw DomainError("fiber_project: k must be >= 0");
  const std::size_t n = samples.size();
  if (n < static_cast<std::size_t>(4 * k + 4))
    throw SamplingError("fiber_project: " + std::to_string(n) + " samples cannot resolve mode k=" +
                        std::to_string(k) + " (need " + std::to_string(4 * k + 4) + ")");
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(i) / static_cast<double>(n);
    c[i] = samples[i] * std::cos(th);
    s[i] = samples[i] * std::sin(th);
  }
  const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n);
  return {scale * pairwise_sum(c), k == 0 ? 0.0 : scale * pairwise_sum(s)};
}

inline double fiber_mean(std::span<const double> samples) { return fiber_project(samples, 0).cos_amp; }

/// Samples of the k-th fiber mode of `samples` (Π₀ for k = 0).
inline std::vector<double> fiber_component(std::span<const double> samples, int k) {
  const FiberAmplitude a = fiber_project(samples, k);
  const std::size_t n = samples.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(i) / static_cast<double>(n);
    out[i] = a.cos_amp * std::cos(th) + a.sin_amp * std::sin(th);
  }
  return out;
}

/// Π⊥ u = u - Π₀ u.
inline std::vector<double> fiber_perp(std::span<const double> samples) {
  const double mean = fiber_mean(samples);
  std::vector<double> out(samples.begin(), samples.end());
  for (double& v : out) v -= mean;
  return out;
}

// ---------------------------------------------------------------------------
// Zonal harmonics on S^{m-1}: Gegenbauer C_j^{(m-2)/2}(cos θ).

inline double zonal_harmonic(int j, int m, double x) {
  require_mode(j, m);
  const double lam = 0.5 * (m - 2);
  double c0 = 1.0;
  if (j == 0) return c0;
  double c1 = 2.0 * lam * x;
  for (int n = 2; n <= j; ++n) {
    const double c2 = (2.0 * x * (n + lam - 1.0) * c1 - (n + 2.0 * lam - 2.0) * c0) / n;
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

}  // namespace alf
