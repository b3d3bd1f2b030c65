#pragma once

// Product quadrature on S^{m-1}(R) × S^1: Gauss–Gegenbauer in the cosine of
// each colatitude, uniform periodic rules in the azimuth and along the fiber.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "alf/errors.hpp"
#include "alf/numeric.hpp"

namespace alf {

struct QuadratureSpec {
  int polar_nodes = 16;
  int azimuth_nodes = 16;
  int fiber_nodes = 8;

  void validate() const {
    if (polar_nodes < 4) throw DomainError("quadrature: polar_nodes must be >= 4");
    if (azimuth_nodes < 4 || azimuth_nodes % 2 != 0)
      throw DomainError("quadrature: azimuth_nodes must be even and >= 4");
    if (fiber_nodes < 4 || fiber_nodes % 2 != 0)
      throw DomainError("quadrature: fiber_nodes must be even and >= 4");
  }

  QuadratureSpec doubled() const { return {2 * polar_nodes, 2 * azimuth_nodes, 2 * fiber_nodes}; }
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for ∫_{-1}^{1} f(x) (1 - x²)^{λ - 1/2} dx (Golub–Welsch).
inline Rule1D gauss_gegenbauer(int n, double lambda) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b2 = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::sqrt(kPi) * std::tgamma(lambda + 0.5) / std::tgamma(lambda + 1.0);
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

inline Rule1D gauss_legendre(int n) { return gauss_gegenbauer(n, 0.5); }

/// Unit-sphere nodes with weights summing to the area of S^{m-1}.
struct SphereRule {
  int dim = 3;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  /// (θ_1, ..., θ_{m-2}, φ) of each node.
  std::vector<std::vector<double>> angles;
};

/// Hyperspherical coordinates: ω_1 = cos θ_1, ω_2 = sin θ_1 cos θ_2, ...,
/// ω_{m-1} = sin θ_1 ⋯ sin θ_{m-2} cos φ, ω_m = sin θ_1 ⋯ sin θ_{m-2} sin φ.
/// θ_k carries the weight sin^{m-1-k} θ_k.
inline SphereRule sphere_rule(int m, int polar_nodes, int azimuth_nodes) {
  if (m < 2) throw DomainError("sphere_rule: dimension must be >= 2");
  std::vector<Rule1D> polar;
  for (int k = 1; k <= m - 2; ++k) polar.push_back(gauss_gegenbauer(polar_nodes, 0.5 * (m - 1 - k)));
  SphereRule rule;
  rule.dim = m;
  const int npolar = m - 2;
  std::vector<int> idx(npolar, 0);
  while (true) {
    double wpolar = 1.0;
    std::vector<double> cosines(npolar), sines(npolar), thetas(npolar);
    for (int k = 0; k < npolar; ++k) {
      const double c = polar[k].nodes[idx[k]];
      cosines[k] = c;
      sines[k] = std::sqrt(std::max(0.0, 1.0 - c * c));
      thetas[k] = std::acos(c);
      wpolar *= polar[k].weights[idx[k]];
    }
    for (int a = 0; a < azimuth_nodes; ++a) {
      const double phi = 2.0 * kPi * a / azimuth_nodes;
      std::vector<double> w(m);
      double prod = 1.0;
      for (int k = 0; k < npolar; ++k) {
        w[k] = prod * cosines[k];
        prod *= sines[k];
      }
      w[m - 2] = prod * std::cos(phi);
      w[m - 1] = prod * std::sin(phi);
      rule.points.push_back(std::move(w));
      rule.weights.push_back(wpolar * 2.0 * kPi / azimuth_nodes);
      std::vector<double> ang = thetas;
      ang.push_back(phi);
      rule.angles.push_back(std::move(ang));
    }
    int k = npolar - 1;
    while (k >= 0) {
      if (++idx[k] < polar_nodes) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return rule;
}

}  // namespace alf
