#pragma once

// Ricci curvature of a metric given by its coordinate components, by nested
// Richardson-improved central differences (metric -> Christoffels -> Ricci).

#include <functional>
#include <span>
#include <vector>

#include "alf/geometry.hpp"

namespace alf {

/// Coordinate components g_{μν}(y) of a metric on an open set of R^n.
using CoordinateMetric = std::function<Matrix(std::span<const double>)>;

/// Coordinate components of a frame-presented family in the patch coordinates
/// (x_1..x_m, t): g_{μν} = M^T G M with the coframe (dx, η = dt + A_i dx_i).
inline CoordinateMetric coordinate_metric(const ModelMetric& model, const MetricFamily& family,
                                          Patch patch) {
  return [model, family, patch](std::span<const double> y) {
    const int m = model.base_dim();
    const int n = m + 1;
    FramePoint p{std::vector<double>(y.begin(), y.begin() + m), y[m], patch};
    const Matrix G = family.components(p);
    const auto A = connection_potential(model, p.x, patch);
    Matrix M = Matrix::Identity(n, n);
    for (int i = 0; i < m; ++i) M(m, i) = A[i];
    return Matrix(M.transpose() * G * M);
  };
}

struct RicciResult {
  Matrix ricci;
  /// Eigenvalues of g^{-1} Ric, ascending.
  Vector eigenvalues;
  double scalar = 0.0;
};

namespace detail {

/// Γ^k_{ij} stored at [k][i][j], from Richardson-extrapolated ∂g.
inline std::vector<Matrix> christoffel(const CoordinateMetric& metric, std::span<const double> y,
                                       double h) {
  const int n = static_cast<int>(y.size());
  std::vector<double> yy(y.begin(), y.end());
  auto eval = [&](int k, double d) {
    yy[k] += d;
    Matrix g = metric(yy);
    yy[k] = y[k];
    return g;
  };
  std::vector<Matrix> dg(n);
  for (int k = 0; k < n; ++k) {
    const Matrix d1 = (eval(k, h) - eval(k, -h)) / (2.0 * h);
    const Matrix d2 = (eval(k, 0.5 * h) - eval(k, -0.5 * h)) / h;
    dg[k] = (4.0 * d2 - d1) / 3.0;
  }
  const Matrix g = metric(y);
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw DomainError("ricci_fd: metric matrix is singular or indefinite");
  const Matrix ginv = ldlt.solve(Matrix::Identity(n, n));
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vector lower(n);
      for (int l = 0; l < n; ++l) lower[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Vector upper = ginv * lower;
      for (int k = 0; k < n; ++k) gamma[k](i, j) = upper[k];
    }
  return gamma;
}

}  // namespace detail

/// Default step for ricci_fd: 1e-2 · max(|x|, 1) with x the base coordinates.
inline double default_ricci_step(std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) s += y[i] * y[i];
  return 1e-2 * std::max(std::sqrt(s), 1.0);
}

inline RicciResult ricci_fd(const CoordinateMetric& metric, std::span<const double> y,
                            double step) {
  if (!(step > 0.0)) throw DomainError("ricci_fd: step must be positive");
  const int n = static_cast<int>(y.size());
  const Matrix g = metric(y);
  if (!g.allFinite()) throw NumericError("ricci_fd: non-finite metric");
  if (std::abs(g.determinant()) < 1e-300) throw DomainError("ricci_fd: metric matrix is singular");

  const auto gamma = detail::christoffel(metric, y, step);
  std::vector<double> yy(y.begin(), y.end());
  auto gamma_at = [&](int l, double d) {
    yy[l] += d;
    auto out = detail::christoffel(metric, yy, step);
    yy[l] = y[l];
    return out;
  };
  // dgamma[l][k](i, j) = ∂_l Γ^k_ij
  std::vector<std::vector<Matrix>> dgamma(n, std::vector<Matrix>(n));
  for (int l = 0; l < n; ++l) {
    const auto p1 = gamma_at(l, step);
    const auto m1 = gamma_at(l, -step);
    const auto p2 = gamma_at(l, 0.5 * step);
    const auto m2 = gamma_at(l, -0.5 * step);
    for (int k = 0; k < n; ++k) {
      const Matrix d1 = (p1[k] - m1[k]) / (2.0 * step);
      const Matrix d2 = (p2[k] - m2[k]) / step;
      dgamma[l][k] = (4.0 * d2 - d1) / 3.0;
    }
  }

  Matrix ric = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += dgamma[k][k](i, j) - dgamma[j][k](i, k);
        for (int l = 0; l < n; ++l)
          s += gamma[k](k, l) * gamma[l](i, j) - gamma[k](j, l) * gamma[l](i, k);
      }
      ric(i, j) = s;
    }
  ric = 0.5 * (ric + ric.transpose()).eval();

  RicciResult out;
  out.ricci = ric;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(ric, g);
  if (es.info() != Eigen::Success) throw DomainError("ricci_fd: metric matrix is singular");
  out.eigenvalues = es.eigenvalues();
  out.scalar = out.eigenvalues.sum();
  return out;
}

inline RicciResult ricci_fd(const CoordinateMetric& metric, std::span<const double> y) {
  return ricci_fd(metric, y, default_ricci_step(y));
}

}  // namespace alf
