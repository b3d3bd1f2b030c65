#pragma once

// Radial problems on a uniform grid in s = log r: the mode operator
//   e^{-2s} [-u_ss - (m-2) u_s + λ_j u] + κ² u,
// its explicit Green operators, Dirichlet solves for fiber modes, weighted
// norms and the Hardy inequality.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "alf/errors.hpp"
#include "alf/modes.hpp"
#include "alf/numeric.hpp"

namespace alf {

struct RadialGrid {
  double s_min = std::log(2.0);
  double s_max = std::log(2048.0);
  int n_points = 1024;

  void validate() const {
    if (n_points < 64) throw ResolutionError("radial grid needs at least 64 points");
    if (!(s_max > s_min)) throw DomainError("radial grid: s_max must exceed s_min");
    if (!(s_min >= 0.0)) throw DomainError("radial grid must lie in the exterior r >= 1");
  }
  double spacing() const { return (s_max - s_min) / (n_points - 1); }
  double s(int i) const { return s_min + spacing() * i; }
  double r(int i) const { return std::exp(s(i)); }
  RadialGrid refined() const { return {s_min, s_max, 2 * n_points - 1}; }
};

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> values;
  int j = 0;
  int k = 0;

  void validate() const {
    grid.validate();
    if (static_cast<int>(values.size()) != grid.n_points)
      throw DomainError("radial profile: value count does not match the grid");
    if (j < 0 || k < 0) throw DomainError("radial profile: mode indices must be >= 0");
    for (double v : values)
      if (!std::isfinite(v)) throw NumericError("radial profile has non-finite values");
  }
};

inline RadialProfile sample_profile(const RadialGrid& grid, const std::function<double(double)>& f,
                                    int j = 0, int k = 0) {
  grid.validate();
  RadialProfile p{grid, std::vector<double>(grid.n_points), j, k};
  for (int i = 0; i < grid.n_points; ++i) p.values[i] = f(grid.r(i));
  return p;
}

inline double fiber_wavenumber(int k, double L) {
  if (!(L > 0.0)) throw DomainError("fiber length must be positive");
  return 2.0 * kPi * k / L;
}

namespace detail {

/// Centered five-point stencils inside; seven-point one-sided stencils at the
/// two nodes nearest each end (one order higher, to offset their larger
/// error constants).
struct Stencil {
  int first = 0;
  std::vector<double> d1;
  std::vector<double> d2;
};

inline std::vector<Stencil> radial_stencils(int n, double h) {
  std::vector<Stencil> out(n);
  for (int i = 0; i < n; ++i) {
    int first = i - 2;
    int width = 5;
    if (i < 2) {
      first = 0;
      width = 7;
    } else if (i > n - 3) {
      first = n - 7;
      width = 7;
    }
    std::vector<double> off(width);
    for (int q = 0; q < width; ++q) off[q] = first + q - i;
    Stencil st;
    st.first = first;
    st.d1 = fd_weights(off, 1);
    st.d2 = fd_weights(off, 2);
    for (double& w : st.d1) w /= h;
    for (double& w : st.d2) w /= h * h;
    out[i] = std::move(st);
  }
  return out;
}

struct Applied {
  std::vector<double> value;
  /// Sum of magnitudes of the individual terms, for relative residuals.
  std::vector<double> scale;
  /// Discrepancy of the second-order second derivative against the fourth-order one.
  std::vector<double> low_order_gap;
};

inline Applied apply_operator(const RadialProfile& p, int m, int j, double kappa) {
  const RadialGrid& g = p.grid;
  const int n = g.n_points;
  const double h = g.spacing();
  const double lam = sphere_eigenvalue(j, m);
  const auto st = radial_stencils(n, h);
  Applied out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n, 0.0)};
  const auto& u = p.values;
  for (int i = 0; i < n; ++i) {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t q = 0; q < st[i].d1.size(); ++q) {
      d1 += st[i].d1[q] * u[st[i].first + q];
      d2 += st[i].d2[q] * u[st[i].first + q];
    }
    const double e2 = std::exp(-2.0 * g.s(i));
    out.value[i] = e2 * (-d2 - (m - 2) * d1 + lam * u[i]) + kappa * kappa * u[i];
    // |u|/r² keeps the scale meaningful for constants on the j = 0 mode.
    out.scale[i] = e2 * (std::abs(d2) + (m - 2) * std::abs(d1) + (lam + 1.0) * std::abs(u[i])) +
                   kappa * kappa * std::abs(u[i]);
    if (i > 0 && i < n - 1) {
      const double d2_low = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
      out.low_order_gap[i] = e2 * std::abs(d2_low - d2);
    }
  }
  return out;
}

}  // namespace detail

/// -∂_rr - ((m-1)/r)∂_r + λ_j/r² + κ², κ = 2πk/L, by fourth-order differences in s.
inline RadialProfile radial_apply(const RadialProfile& p, int m, int j, int k, double L) {
  p.validate();
  const double kappa = fiber_wavenumber(k, L);
  const auto a = detail::apply_operator(p, m, j, kappa);
  double top = 0.0;
  for (double s : a.scale) top = std::max(top, s);
  for (int i = 0; i < p.grid.n_points; ++i) {
    if (a.scale[i] <= 1e-12 * top) continue;
    if (a.low_order_gap[i] > 0.05 * a.scale[i])
      throw ResolutionError("radial_apply: grid too coarse near r=" + std::to_string(p.grid.r(i)) +
                            " (second- and fourth-order stencils disagree)");
  }
  return {p.grid, a.value, j, k};
}

/// max_i |(A u - f)_i| / (scale_i + |f_i|), ignoring nodes where both are
/// below 1e-12 of their maximum; `skip` end nodes on each side are excluded.
inline double relative_residual(const RadialProfile& u, const RadialProfile& f, int m, int j, int k,
                                double L, int skip = 0) {
  u.validate();
  const auto a = detail::apply_operator(u, m, j, fiber_wavenumber(k, L));
  const int n = u.grid.n_points;
  std::vector<double> den(n);
  double top = 0.0;
  for (int i = 0; i < n; ++i) {
    den[i] = a.scale[i] + std::abs(f.values[i]);
    top = std::max(top, den[i]);
  }
  double worst = 0.0;
  for (int i = skip; i < n - skip; ++i) {
    if (den[i] <= 1e-12 * top) continue;
    worst = std::max(worst, std::abs(a.value[i] - f.values[i]) / den[i]);
  }
  return worst;
}

namespace detail {

/// ∫ over [s_i, s_{i+1}] of φ from nodal values by six-point interpolatory
/// rules (centered inside, one-sided at the ends), sixth order. A lower-order
/// rule anywhere leaves a kink that second differences amplify by h^{-2}.
/// `phi(q)` returns φ at node q; requires n >= 6.
template <class Phi>
double interval_integral(int i, int n, double h, const Phi& phi) {
  static constexpr double kFirst[6] = {475.0, 1427.0, -798.0, 482.0, -173.0, 27.0};
  static constexpr double kSecond[6] = {-27.0, 637.0, 1022.0, -258.0, 77.0, -11.0};
  static constexpr double kCenter[6] = {11.0, -93.0, 802.0, 802.0, -93.0, 11.0};
  double s = 0.0;
  if (i == 0) {
    for (int q = 0; q < 6; ++q) s += kFirst[q] * phi(q);
  } else if (i == 1) {
    for (int q = 0; q < 6; ++q) s += kSecond[q] * phi(q);
  } else if (i == n - 2) {
    for (int q = 0; q < 6; ++q) s += kFirst[q] * phi(n - 1 - q);
  } else if (i == n - 3) {
    for (int q = 0; q < 6; ++q) s += kSecond[q] * phi(n - 1 - q);
  } else {
    for (int q = 0; q < 6; ++q) s += kCenter[q] * phi(i - 2 + q);
  }
  return h / 1440.0 * s;
}

inline void require_k0(const RadialProfile& f, const char* what) {
  if (f.k != 0) throw DomainError(std::string(what) + ": defined for the fiber-invariant mode k = 0");
}

}  // namespace detail

/// Dirichlet Green operator on [R0, ∞): u = (w⁺ - w⁻) / (2(1 - δ_j)),
/// w^±(s) = ∫_{log R0}^{s} e^{ν^±(s-σ)} e^{2σ} f(σ) dσ, so u(R0) = 0.
inline RadialProfile green_mid(int m, int j, double R0, const RadialProfile& f) {
  f.validate();
  detail::require_k0(f, "green_mid");
  const IndicialData d = indicial_data(j, m);
  if (std::abs(1.0 - d.delta_j) < 1e-12) throw DomainError("green_mid: δ_j = 1 is singular");
  const RadialGrid& grid = f.grid;
  const int n = grid.n_points;
  const double h = grid.spacing();
  const double s0 = std::log(R0);
  const double pos = (s0 - grid.s_min) / h;
  const int i0 = static_cast<int>(std::lround(pos));
  if (i0 < 0 || i0 > n - 6 || std::abs(pos - i0) > 1e-6)
    throw DomainError("green_mid: R0 must be a grid node at least six nodes from the end");
  std::vector<double> gsrc(n);
  for (int i = 0; i < n; ++i) gsrc[i] = std::exp(2.0 * grid.s(i)) * f.values[i];

  RadialProfile u{grid, std::vector<double>(n, 0.0), j, 0};
  const double coef = 1.0 / (2.0 * (1.0 - d.delta_j));
  for (double nu : {d.nu_plus, d.nu_minus}) {
    const double sign = nu == d.nu_plus ? 1.0 : -1.0;
    const double step = std::exp(nu * h);
    double w = 0.0;
    for (int i = i0; i < n - 1; ++i) {
      const double right = grid.s(i + 1);
      auto phi = [&](int q) { return std::exp(nu * (right - grid.s(q))) * gsrc[q]; };
      // Rules near R0 must not reach below it: index from R0 as the start.
      auto shifted = [&](int q) { return phi(q + i0); };
      const double piece = detail::interval_integral(i - i0, n - i0, h, shifted);
      w = step * w + piece;
      u.values[i + 1] += sign * coef * w;
    }
  }
  return u;
}

/// Green operator with both integrals taken from infinity,
/// w^±(s) = -∫_s^∞ e^{ν^±(s-σ)} e^{2σ} f(σ) dσ. The tail beyond the grid is
/// integrated analytically from the local exponential rate of e^{2s} f.
inline RadialProfile green_outer(int m, int j, const RadialProfile& f) {
  f.validate();
  detail::require_k0(f, "green_outer");
  const IndicialData d = indicial_data(j, m);
  const RadialGrid& grid = f.grid;
  const int n = grid.n_points;
  const double h = grid.spacing();
  std::vector<double> gsrc(n);
  for (int i = 0; i < n; ++i) gsrc[i] = std::exp(2.0 * grid.s(i)) * f.values[i];

  // Local exponent of the source at the end of the grid.
  const int back = 8;
  const double ga = gsrc[n - 1 - back], gb = gsrc[n - 1];
  double rate = 0.0;
  const bool tail = gb != 0.0;
  if (tail) {
    if (ga == 0.0 || (ga > 0.0) != (gb > 0.0))
      throw DecayError("green_outer: source changes sign or vanishes near the end of the grid");
    rate = std::log(std::abs(gb / ga)) / (back * h);
  }

  RadialProfile u{grid, std::vector<double>(n, 0.0), j, 0};
  const double coef = 1.0 / (2.0 * (1.0 - d.delta_j));
  for (double nu : {d.nu_plus, d.nu_minus}) {
    const double sign = nu == d.nu_plus ? 1.0 : -1.0;
    double w = 0.0;
    if (tail) {
      if (rate - nu >= -1e-3)
        throw DecayError("green_outer: source decays like r^" + std::to_string(rate - 2.0) +
                         ", too slowly for the tail integral against r^" + std::to_string(nu));
      w = -gb / (nu - rate);
    }
    u.values[n - 1] += sign * coef * w;
    const double step = std::exp(-nu * h);
    for (int i = n - 2; i >= 0; --i) {
      const double left = grid.s(i);
      auto phi = [&](int q) { return std::exp(nu * (left - grid.s(q))) * gsrc[q]; };
      w = step * w - detail::interval_integral(i, n, h, phi);
      u.values[i] += sign * coef * w;
    }
  }
  return u;
}

/// Dirichlet problem A u = f, u = 0 at both grid ends, for fiber mode k ≥ 1.
inline RadialProfile solve_k_mode(int m, int j, int k, double L, const RadialProfile& f,
                                  const RadialGrid& grid) {
  grid.validate();
  if (k < 1) throw DomainError("solve_k_mode: fiber mode k must be >= 1");
  if (static_cast<int>(f.values.size()) != grid.n_points)
    throw DomainError("solve_k_mode: source does not match the grid");
  const int n = grid.n_points;
  const double h = grid.spacing();
  const double kappa = fiber_wavenumber(k, L);
  const double lam = sphere_eigenvalue(j, m);
  RadialProfile u{grid, std::vector<double>(n, 0.0), j, k};
  double fnorm = 0.0;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw NumericError("solve_k_mode: non-finite source");
    fnorm += v * v;
  }
  if (fnorm == 0.0) return u;

  const auto st = detail::radial_stencils(n, h);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  trips.emplace_back(0, 0, 1.0);
  trips.emplace_back(n - 1, n - 1, 1.0);
  for (int i = 1; i < n - 1; ++i) {
    const double e2 = std::exp(-2.0 * grid.s(i));
    for (std::size_t q = 0; q < st[i].d1.size(); ++q) {
      const int col = st[i].first + static_cast<int>(q);
      double w = e2 * (-st[i].d2[q] - (m - 2) * st[i].d1[q]);
      if (col == i) w += e2 * lam + kappa * kappa;
      trips.emplace_back(i, col, w);
    }
    rhs[i] = f.values[i];
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericError("solve_k_mode: factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw NumericError("solve_k_mode: solve failed");
  const double res = (A * x - rhs).norm() / rhs.norm();
  if (!(res < 1e-8)) throw NumericError("solve_k_mode: residual " + std::to_string(res) + " too large");
  for (int i = 0; i < n; ++i) u.values[i] = x[i];
  return u;
}

// ---------------------------------------------------------------------------
// Weighted norms

namespace detail {

/// Cumulative ∫_{s_min}^{s_i} φ ds at every node.
inline std::vector<double> cumulative_integral(const std::vector<double>& phi, double h) {
  const int n = static_cast<int>(phi.size());
  std::vector<double> c(n, 0.0);
  auto at = [&](int q) { return phi[q]; };
  for (int i = 0; i < n - 1; ++i) c[i + 1] = c[i] + interval_integral(i, n, h, at);
  return c;
}

/// Cubic Hermite interpolation of C (with C' = φ) at s.
inline double hermite_at(const RadialGrid& g, const std::vector<double>& c, const std::vector<double>& phi,
                         double s) {
  const double h = g.spacing();
  const int n = g.n_points;
  double pos = (s - g.s_min) / h;
  int i = static_cast<int>(std::floor(pos));
  i = std::clamp(i, 0, n - 2);
  const double t = pos - i;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * c[i] + h10 * h * phi[i] + h01 * c[i + 1] + h11 * h * phi[i + 1];
}

inline std::vector<double> weighted_density(const RadialProfile& p, double delta, int m) {
  std::vector<double> phi(p.grid.n_points);
  for (int i = 0; i < p.grid.n_points; ++i)
    phi[i] = p.values[i] * p.values[i] * std::exp((m - 2.0 * delta) * p.grid.s(i));
  return phi;
}

}  // namespace detail

/// (w ∫_{R1}^{R2} u² r^{m-1-2δ} dr)^{1/2}; `mode_weight` carries the angular
/// and fiber measure of the mode (1 for a normalized mode).
inline double weighted_norm(const RadialProfile& p, double delta, int m, double R1, double R2,
                            double mode_weight = 1.0) {
  p.validate();
  const double a = std::log(R1), b = std::log(R2);
  const double tol = 1e-12 * (1.0 + std::abs(p.grid.s_max));
  if (!(a >= p.grid.s_min - tol && b <= p.grid.s_max + tol && a <= b))
    throw DomainError("weighted_norm: region must lie inside the grid");
  const auto phi = detail::weighted_density(p, delta, m);
  const auto c = detail::cumulative_integral(phi, p.grid.spacing());
  const double v = detail::hermite_at(p.grid, c, phi, b) - detail::hermite_at(p.grid, c, phi, a);
  return std::sqrt(std::max(0.0, mode_weight * v));
}

/// Multimode field given as independent modes with their Parseval weights.
inline double weighted_norm(const std::vector<RadialProfile>& modes, const std::vector<double>& weights,
                            double delta, int m, double R1, double R2) {
  if (modes.size() != weights.size()) throw DomainError("weighted_norm: one weight per mode");
  double s = 0.0;
  for (std::size_t q = 0; q < modes.size(); ++q) {
    const double v = weighted_norm(modes[q], delta, m, R1, R2, weights[q]);
    s += v * v;
  }
  return std::sqrt(s);
}

enum class Membership { Member, LogDivergent, Divergent };

inline const char* membership_name(Membership c) {
  switch (c) {
    case Membership::Member: return "member";
    case Membership::LogDivergent: return "log-divergent";
    default: return "divergent";
  }
}

struct MembershipReport {
  Membership verdict = Membership::Member;
  /// Slope of log2 of the annulus contributions against the annulus index.
  double slope = 0.0;
  std::vector<double> annulus_squares;
};

/// Classifies L²_δ membership at infinity from the growth of ∫_{A_{2^i}} u² dμ_δ
/// over the dyadic annuli inside the grid.
inline MembershipReport classify_membership(const RadialProfile& p, double delta, int m,
                                            double flat_band = 0.05) {
  p.validate();
  const auto phi = detail::weighted_density(p, delta, m);
  const auto c = detail::cumulative_integral(phi, p.grid.spacing());
  const double ln2 = std::log(2.0);
  const int i_lo = static_cast<int>(std::ceil(p.grid.s_min / ln2 - 1e-9));
  const int i_hi = static_cast<int>(std::floor(p.grid.s_max / ln2 + 1e-9)) - 1;
  if (i_hi - i_lo + 1 < 3) throw DomainError("classify_membership: grid spans fewer than three dyadic annuli");
  MembershipReport out;
  std::vector<double> xs, ys;
  for (int i = i_lo; i <= i_hi; ++i) {
    const double v = detail::hermite_at(p.grid, c, phi, (i + 1) * ln2) - detail::hermite_at(p.grid, c, phi, i * ln2);
    out.annulus_squares.push_back(v);
    if (v <= 0.0) throw DegenerateInputError("classify_membership: profile vanishes on an annulus");
    xs.push_back(i);
    ys.push_back(std::log2(v));
  }
  const double nx = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    mx += xs[q] / nx;
    my += ys[q] / nx;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    sxy += (xs[q] - mx) * (ys[q] - my);
    sxx += (xs[q] - mx) * (xs[q] - mx);
  }
  out.slope = sxy / sxx;
  if (out.slope < -flat_band) out.verdict = Membership::Member;
  else if (out.slope <= flat_band) out.verdict = Membership::LogDivergent;
  else out.verdict = Membership::Divergent;
  return out;
}

// ---------------------------------------------------------------------------
// Hardy inequality

/// Smooth step: 0 for s ≤ s0, 1 for s ≥ s1.
struct Cutoff {
  double s0 = 0.0;
  double s1 = 1.0;

  static double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
  double operator()(double s) const {
    const double x = (s - s0) / (s1 - s0);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return bump(x) / (bump(x) + bump(1.0 - x));
  }
  double derivative(double s) const {
    const double x = (s - s0) / (s1 - s0);
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = bump(x), b = bump(1.0 - x);
    const double da = a / (x * x), db = -b / ((1.0 - x) * (1.0 - x));
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b)) / (s1 - s0);
  }
};

/// ((m-2δ)²/4) ∫ (χv)² dμ_δ / ∫ ((χv)')² dμ_δ, derivatives in s.
inline double hardy_ratio(const RadialProfile& v, double delta, int m, const Cutoff& chi) {
  v.validate();
  if (!(chi.s1 > chi.s0)) throw DomainError("hardy_ratio: cutoff needs s1 > s0");
  const int n = v.grid.n_points;
  const double h = v.grid.spacing();
  const auto st = detail::radial_stencils(n, h);
  std::vector<double> num(n), den(n);
  for (int i = 0; i < n; ++i) {
    const double s = v.grid.s(i);
    double dv = 0.0;
    for (std::size_t q = 0; q < st[i].d1.size(); ++q) dv += st[i].d1[q] * v.values[st[i].first + q];
    const double w = chi(s) * v.values[i];
    const double dw = chi.derivative(s) * v.values[i] + chi(s) * dv;
    const double mu = std::exp((m - 2.0 * delta) * s);
    num[i] = w * w * mu;
    den[i] = dw * dw * mu;
  }
  const double top = detail::cumulative_integral(num, h).back();
  const double bottom = detail::cumulative_integral(den, h).back();
  if (!(bottom > 0.0)) throw DegenerateInputError("hardy_ratio: (χv)' vanishes identically");
  return 0.25 * (m - 2.0 * delta) * (m - 2.0 * delta) * top / bottom;
}

}  // namespace alf
