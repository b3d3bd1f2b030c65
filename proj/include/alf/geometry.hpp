#pragma once

// Model metrics h = dx^2 + eta^2 on exterior circle fibrations, their adapted
// frames (X_1..X_m, T), connection coefficients, the model Laplacian and
// covariant derivatives of metric families.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "alf/errors.hpp"
#include "alf/numeric.hpp"

namespace alf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TrivialFlat {};

/// Hopf-type circle bundle over R^3 \ B^3 with Chern number `charge`.
struct Monopole {
  int charge = 1;
};

using ConnectionData = std::variant<TrivialFlat, Monopole>;

/// Local trivialization of the Hopf-type bundle. North is regular away from
/// the negative x_3 axis, South away from the positive one.
enum class Patch { North, South };

class ModelMetric {
 public:
  static ModelMetric trivial(int base_dim, double fiber_length) {
    return ModelMetric(base_dim, fiber_length, TrivialFlat{});
  }

  /// dη = (k L / 4π) × (pullback of the unit S^2 area form); with this
  /// normalization the bundle has Chern number k for any fiber length L.
  static ModelMetric hopf(int charge, double fiber_length) {
    if (charge < 1) throw DomainError("monopole charge must be >= 1");
    return ModelMetric(3, fiber_length, Monopole{charge});
  }

  int base_dim() const { return m_; }
  int dim() const { return m_ + 1; }
  double fiber_length() const { return L_; }
  const ConnectionData& connection() const { return connection_; }
  bool is_trivial() const { return std::holds_alternative<TrivialFlat>(connection_); }
  int monopole_charge() const {
    return is_trivial() ? 0 : std::get<Monopole>(connection_).charge;
  }
  /// Coefficient c with dη = c · (unit-sphere area form).
  double curvature_strength() const {
    return is_trivial() ? 0.0 : monopole_charge() * L_ / (4.0 * kPi);
  }
  std::string fibration_name() const { return is_trivial() ? "trivial" : "hopf"; }

 private:
  ModelMetric(int m, double L, ConnectionData c) : m_(m), L_(L), connection_(c) {
    if (m_ < 3) throw DomainError("base dimension must be >= 3");
    if (!(L_ > 0.0)) throw DomainError("fiber length must be positive");
  }

  int m_;
  double L_;
  ConnectionData connection_;
};

struct FramePoint {
  std::vector<double> x;
  double t = 0.0;
  Patch patch = Patch::North;

  double radius() const {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
  }
};

inline std::string describe(const FramePoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(x=[";
  for (std::size_t i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << p.x[i];
  os << "], t=" << p.t << ", patch=" << (p.patch == Patch::North ? "N" : "S") << ")";
  return os.str();
}

/// Point in the canonical patch (North when x_m >= 0).
inline FramePoint make_point(std::vector<double> x, double t = 0.0) {
  FramePoint p{std::move(x), t, Patch::North};
  if (!p.x.empty() && p.x.back() < 0.0) p.patch = Patch::South;
  return p;
}

/// Two-patch monopole potential A with η = dt + A_i dx_i in the point's patch.
/// Returns zeros for the trivial fibration.
template <class S>
std::vector<S> connection_potential(const ModelMetric& model, const std::vector<S>& x,
                                    Patch patch) {
  std::vector<S> a(x.size(), S(0.0));
  if (model.is_trivial()) return a;
  const double c = model.curvature_strength();
  const S rho2 = x[0] * x[0] + x[1] * x[1];
  const S r = std::sqrt(rho2 + x[2] * x[2]);
  const S cz = x[2] / r;
  const S f = (patch == Patch::North) ? c * (1.0 - cz) / rho2 : -c * (1.0 + cz) / rho2;
  a[0] = -f * x[1];
  a[1] = f * x[0];
  return a;
}

/// Fiber coordinate change between the patches: t_S = t_N + 2cφ (mod L).
inline FramePoint switch_patch(const ModelMetric& model, const FramePoint& p) {
  if (model.is_trivial()) return p;
  const double c = model.curvature_strength();
  const double phi = std::atan2(p.x[1], p.x[0]);
  const double L = model.fiber_length();
  FramePoint q = p;
  if (p.patch == Patch::North) {
    q.patch = Patch::South;
    q.t = std::fmod(p.t + 2.0 * c * phi, L);
  } else {
    q.patch = Patch::North;
    q.t = std::fmod(p.t - 2.0 * c * phi, L);
  }
  if (q.t < 0.0) q.t += L;
  return q;
}

/// Moves a point off the singular axis of its patch (never fails for r > 0).
inline FramePoint regular_patch(const ModelMetric& model, const FramePoint& p) {
  if (model.is_trivial()) return p;
  const double r = p.radius();
  const double cz = p.x[2] / r;
  const bool near_singular = (p.patch == Patch::North) ? cz < -0.5 : cz > 0.5;
  return near_singular ? switch_patch(model, p) : p;
}

/// Curvature two-form ω_ij = dη(X_i, X_j) of the model connection at base point x.
inline Matrix curvature_form(const ModelMetric& model, const std::vector<double>& x) {
  const int m = model.base_dim();
  Matrix w = Matrix::Zero(m, m);
  if (model.is_trivial()) return w;
  const double c = model.curvature_strength();
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double r3 = r2 * std::sqrt(r2);
  // ω(∂_i, ∂_j) = c ε_ijl x_l / r^3
  w(0, 1) = c * x[2] / r3;
  w(1, 2) = c * x[0] / r3;
  w(2, 0) = c * x[1] / r3;
  w(1, 0) = -w(0, 1);
  w(2, 1) = -w(1, 2);
  w(0, 2) = -w(2, 0);
  return w;
}

/// h(∇_{e_a} e_b, e_c) in the adapted frame, indices ordered (X_1..X_m, T).
class ConnectionCoeffs {
 public:
  explicit ConnectionCoeffs(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
  int dim() const { return n_; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int a, int b, int c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  int n_;
  std::vector<double> data_;
};

inline void require_exterior(const FramePoint& p) {
  const double r = p.radius();
  if (!(r > 1.0))
    throw DomainError("point " + describe(p) + " is not in the exterior domain r > 1");
}

inline ConnectionCoeffs frame_connection_coeffs(const ModelMetric& model, const FramePoint& p) {
  require_exterior(p);
  const int m = model.base_dim();
  ConnectionCoeffs g(m + 1);
  if (model.is_trivial()) return g;
  const Matrix w = curvature_form(model, p.x);
  const int T = m;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double half = 0.5 * w(i, j);
      g(i, T, j) = half;
      g(T, i, j) = half;
      g(i, j, T) = -half;
    }
  }
  return g;
}

/// Frame components g_ab of a bilinear form in the adapted frame.
using FrameTensor2 = Matrix;

/// (∇^h g)(e_a, e_b; e_c) stored as per-direction matrices: dir[c](a, b).
struct CovDerivTensor {
  std::vector<Matrix> dir;

  int dim() const { return static_cast<int>(dir.size()); }
  double operator()(int a, int b, int c) const { return dir[c](a, b); }

  static CovDerivTensor zero(int n) { return CovDerivTensor{std::vector<Matrix>(n, Matrix::Zero(n, n))}; }
};

/// An ALF metric given by its frame components relative to a model.
struct MetricFamily {
  std::string name;
  std::function<FrameTensor2(const FramePoint&)> components;
  /// Optional machine-precision covariant derivative.
  std::function<CovDerivTensor(const FramePoint&)> exact_derivative;
  /// Exponent a with g - h = O(r^{-a}).
  double decay_order = 1.0;
};

inline void require_finite(const Matrix& g, const FramePoint& p, const char* what) {
  if (!g.allFinite())
    throw NumericError(std::string("non-finite ") + what + " at " + describe(p));
}

/// Shift a point along the frame vector e_c by `h` (straight line in the
/// patch coordinates with the tangent of e_c at the base point).
inline FramePoint shifted_along_frame(const ModelMetric& model, const FramePoint& p, int c,
                                      double h) {
  const int m = model.base_dim();
  FramePoint q = p;
  if (c == m) {
    q.t += h;
    return q;
  }
  const auto a = connection_potential(model, p.x, p.patch);
  q.x[c] += h;
  q.t -= h * a[c];
  return q;
}

/// Turns raw directional derivatives e_c(g_ab) into (∇^h_{e_c} g)(e_a, e_b).
inline CovDerivTensor covariant_from_directional(const ConnectionCoeffs& gamma, const Matrix& g,
                                                 std::vector<Matrix> raw) {
  const int n = gamma.dim();
  for (int c = 0; c < n; ++c) {
    Matrix corr = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += gamma(c, a, d) * g(d, b) + gamma(c, b, d) * g(a, d);
        corr(a, b) = s;
      }
    raw[c] -= corr;
  }
  return CovDerivTensor{std::move(raw)};
}

/// Inverse of covariant_from_directional: e_c(g_ab) from ∇g.
inline std::vector<Matrix> directional_from_covariant(const ConnectionCoeffs& gamma,
                                                      const Matrix& g,
                                                      const CovDerivTensor& cov) {
  const int n = gamma.dim();
  std::vector<Matrix> raw = cov.dir;
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += gamma(c, a, d) * g(d, b) + gamma(c, b, d) * g(a, d);
        raw[c](a, b) += s;
      }
  return raw;
}

enum class DerivativeMode { Auto, FiniteDifference, Exact };

inline double default_fd_step(const FramePoint& p) { return 1e-4 * std::max(p.radius(), 1.0); }

/// Central-difference covariant derivative of the family along the adapted frame.
inline CovDerivTensor covariant_derivative_fd(const ModelMetric& model, const MetricFamily& family,
                                              const FramePoint& p0, double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const FramePoint p = regular_patch(model, p0);
  require_exterior(p);
  const int n = model.dim();
  const Matrix g = family.components(p);
  require_finite(g, p, "metric");
  std::vector<Matrix> raw(n);
  for (int c = 0; c < n; ++c) {
    const FramePoint qp = shifted_along_frame(model, p, c, step);
    const FramePoint qm = shifted_along_frame(model, p, c, -step);
    const Matrix gp = family.components(qp);
    const Matrix gm = family.components(qm);
    require_finite(gp, qp, "metric");
    require_finite(gm, qm, "metric");
    raw[c] = (gp - gm) / (2.0 * step);
  }
  return covariant_from_directional(frame_connection_coeffs(model, p), g, std::move(raw));
}

inline CovDerivTensor covariant_derivative_metric(const ModelMetric& model,
                                                  const MetricFamily& family, const FramePoint& p,
                                                  double step,
                                                  DerivativeMode mode = DerivativeMode::Auto) {
  const bool exact = mode == DerivativeMode::Exact ||
                     (mode == DerivativeMode::Auto && static_cast<bool>(family.exact_derivative));
  if (exact) {
    if (!family.exact_derivative)
      throw UnsupportedModelError("family '" + family.name + "' has no exact derivative");
    const FramePoint q = regular_patch(model, p);
    require_exterior(q);
    CovDerivTensor d = family.exact_derivative(q);
    for (const auto& mat : d.dir) require_finite(mat, q, "metric derivative");
    return d;
  }
  return covariant_derivative_fd(model, family, p, step);
}

/// Max-norm discrepancy between the exact and finite-difference derivatives.
inline double derivative_cross_check(const ModelMetric& model, const MetricFamily& family,
                                     const FramePoint& p, double step) {
  const auto e = covariant_derivative_metric(model, family, p, step, DerivativeMode::Exact);
  const auto f = covariant_derivative_fd(model, family, p, step);
  double worst = 0.0;
  for (int c = 0; c < e.dim(); ++c) worst = std::max(worst, (e.dir[c] - f.dir[c]).cwiseAbs().maxCoeff());
  return worst;
}

using ScalarField = std::function<double(const FramePoint&)>;

/// Δ_h u = -∂_kk u - ∂_tt u + 2 A_k ∂_kt u - A_k^2 ∂_tt u + (∂_k A_k) ∂_t u
/// in the local coordinates (x, t) of the point's patch (nonnegative Laplacian).
inline double model_laplacian(const ModelMetric& model, const ScalarField& u, const FramePoint& p0,
                              double step) {
  // Second differences carry no significant digits below this step.
  if (!(step > 1e-8 * std::max(p0.radius(), 1.0)))
    throw NumericError("laplacian step underflow at " + describe(p0));
  const FramePoint p = regular_patch(model, p0);
  require_exterior(p);
  const int m = model.base_dim();
  const double h = step;
  auto at = [&](const std::vector<double>& dx, double dt) {
    FramePoint q = p;
    for (int k = 0; k < m; ++k) q.x[k] += dx[k];
    q.t += dt;
    const double v = u(q);
    if (!std::isfinite(v)) throw NumericError("non-finite field value at " + describe(q));
    return v;
  };
  const std::vector<double> zero(m, 0.0);
  const double u0 = at(zero, 0.0);
  const double upt = at(zero, h);
  const double umt = at(zero, -h);
  const double d_tt = (upt - 2.0 * u0 + umt) / (h * h);
  const double d_t = (upt - umt) / (2.0 * h);

  const auto A = connection_potential(model, p.x, p.patch);
  double result = -d_tt;
  double divA = 0.0;
  for (int k = 0; k < m; ++k) {
    std::vector<double> e(m, 0.0);
    e[k] = h;
    std::vector<double> me(m, 0.0);
    me[k] = -h;
    const double up = at(e, 0.0);
    const double um = at(me, 0.0);
    const double d_kk = (up - 2.0 * u0 + um) / (h * h);
    result -= d_kk;
    if (!model.is_trivial()) {
      const double d_kt = (at(e, h) - at(e, -h) - at(me, h) + at(me, -h)) / (4.0 * h * h);
      result += 2.0 * A[k] * d_kt - A[k] * A[k] * d_tt;
      std::vector<double> xp = p.x, xm = p.x;
      xp[k] += h;
      xm[k] -= h;
      divA += (connection_potential(model, xp, p.patch)[k] -
               connection_potential(model, xm, p.patch)[k]) /
              (2.0 * h);
    }
  }
  result += divA * d_t;
  return result;
}

}  // namespace alf
