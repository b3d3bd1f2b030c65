#include <gtest/gtest.h>

#include "alf/mass.hpp"

using namespace alf;

namespace {

const RadiusSchedule kSchedule{16.0, 2.0, 6};
const QuadratureSpec kQuad{};

zoo::AlfMetric schwarzschild(int n, double gamma, const std::string& chart = "isotropic") {
  return zoo::make_metric("schwarzschild", {{"n", n}, {"gamma", gamma}}, chart);
}

/// The family translated by `c` on the base: same metric, off-center boundary spheres.
MetricFamily translated(const MetricFamily& f, std::vector<double> c) {
  MetricFamily t = f;
  auto shift = [c](FramePoint p) {
    for (std::size_t i = 0; i < c.size(); ++i) p.x[i] -= c[i];
    return p;
  };
  t.components = [base = f.components, shift](const FramePoint& p) { return base(shift(p)); };
  t.exact_derivative = [base = f.exact_derivative, shift](const FramePoint& p) { return base(shift(p)); };
  return t;
}

}  // namespace

TEST(Integrands, FlatFamilyVanishes) {
  for (const auto& g : {zoo::make_metric("flat", {{"m", 3}}), zoo::make_metric("flat", {{"m", 5}}),
                        zoo::make_metric("flat", {{"monopole-k", 2}})}) {
    std::vector<double> x(g.model.base_dim(), 1.0);
    x[0] = 4.0;
    const auto p = make_point(x, 0.3);
    EXPECT_EQ(gb_integrand_radial(g.model, g.metric, p), 0.0);
    if (g.model.is_trivial()) EXPECT_EQ(dirac_integrand_radial(g.model, g.metric, p), 0.0);
  }
}

TEST(Integrands, SchwarzschildIsotropicClosedForm) {
  // g = ψ dx² + b η²: GB = -((m-1)ψ' + ½ b'), Dirac = -((m-1)ψ' + b').
  const auto g = schwarzschild(4, 1.0);
  const double u = 10.0;
  const double w = 0.25 / u, dw = -0.25 / (u * u);
  const double dpsi = 4.0 * std::pow(1.0 + w, 3) * dw;
  const double lapse = (1.0 - w) / (1.0 + w);
  const double db = 2.0 * lapse * (-2.0 * dw / ((1.0 + w) * (1.0 + w)));
  const auto p = make_point({0.0, u, 0.0});
  EXPECT_NEAR(gb_integrand_radial(g.model, g.metric, p), -(2.0 * dpsi + 0.5 * db), 1e-14);
  EXPECT_NEAR(dirac_integrand_radial(g.model, g.metric, p), -(2.0 * dpsi + db), 1e-14);
  // Leading terms (n-1)/2 · u^{2-n} and u^{2-n}.
  EXPECT_NEAR(gb_integrand_radial(g.model, g.metric, p), 0.015, 2.5 / (u * u * u));
  EXPECT_NEAR(dirac_integrand_radial(g.model, g.metric, p), 0.01, 2.5 / (u * u * u));
}

TEST(Integrands, LeadingTermsOfOtherFamilies) {
  const auto tn = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}});
  const auto rn = zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1}});
  for (double r : {10.0, 20.0}) {
    const auto p = make_point({0.0, 0.6 * r, 0.8 * r}, 1.0);
    EXPECT_NEAR(gb_integrand_radial(tn.model, tn.metric, p), 3.0 / (r * r), 5.0 / (r * r * r));
    EXPECT_NEAR(dirac_integrand_radial(rn.model, rn.metric, p), -1.0 / (r * r), 5.0 / (r * r * r));
  }
}

TEST(Integrands, DiracRequiresTrivialFibration) {
  const auto tn = zoo::make_metric("taub-nut", {{"mass-param", 1}});
  EXPECT_THROW(dirac_integrand_radial(tn.model, tn.metric, make_point({0.0, 0.0, 10.0})),
               UnsupportedModelError);
  EXPECT_THROW(mass_dirac(tn, kSchedule, kQuad), UnsupportedModelError);
}

TEST(Integrands, ExactAndFiniteDifferenceDerivativesAgree) {
  const auto g = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 2}});
  const auto p = make_point({3.0, -4.0, 2.0}, 0.7);
  MassOptions fd;
  fd.derivative = DerivativeMode::FiniteDifference;
  EXPECT_NEAR(gb_integrand_radial(g.model, g.metric, p), gb_integrand_radial(g.model, g.metric, p, fd),
              1e-8);
}

TEST(Masses, Schwarzschild) {
  const auto g = schwarzschild(4, 1.0);
  const auto gb = mass_gb(g, kSchedule, kQuad);
  const auto d = mass_dirac(g, kSchedule, kQuad);
  EXPECT_NEAR(gb.extrapolated, 1.5, 1e-3);
  EXPECT_NEAR(d.extrapolated, 1.0, 1e-3);
  EXPECT_EQ(gb.values.size(), 6u);
  EXPECT_NEAR(gb.fit_order, 1.0, 0.05);
  EXPECT_TRUE(std::isfinite(gb.residual));
  EXPECT_NEAR(gb.extrapolated / d.extrapolated, 1.5, 2e-3);
  EXPECT_NEAR(mass_dirac(schwarzschild(4, 2.0), kSchedule, kQuad).extrapolated, 2.0, 2e-3);
}

TEST(Masses, SchwarzschildFiveDimensional) {
  const auto g = schwarzschild(5, 1.0);
  EXPECT_NEAR(mass_gb(g, kSchedule, kQuad).extrapolated, 2.0, 1e-3);
  EXPECT_NEAR(mass_dirac(g, kSchedule, kQuad).extrapolated, 1.0, 1e-3);
}

TEST(Masses, ReissnerNordstromNegativeMass) {
  const auto g = zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1}});
  EXPECT_NEAR(mass_dirac(g, kSchedule, kQuad).extrapolated, -1.0, 1e-3);
}

TEST(Masses, TaubNut) {
  const auto k1 = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}});
  const auto k2 = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 2}});
  EXPECT_NEAR(mass_gb(k1, kSchedule, kQuad).extrapolated, 3.0, 1e-2);
  EXPECT_NEAR(mass_gb(k2, kSchedule, kQuad).extrapolated, 6.0, 2e-2);
}

TEST(Masses, FlatIsZero) {
  const auto g = zoo::make_metric("flat", {{"m", 4}});
  const auto gb = mass_gb(g, kSchedule, kQuad);
  EXPECT_EQ(gb.extrapolated, 0.0);
  EXPECT_EQ(gb.method, "constant");
  EXPECT_EQ(mass_dirac(g, kSchedule, kQuad).extrapolated, 0.0);
  EXPECT_EQ(mass_gb(zoo::make_metric("flat", {{"monopole-k", 1}}), kSchedule, kQuad).extrapolated, 0.0);
}

TEST(Masses, MetadataAndNormalization) {
  const auto g = schwarzschild(5, 1.0);
  const auto r = mass_gb(g, kSchedule, kQuad);
  EXPECT_EQ(r.base_dim, 4);
  EXPECT_NEAR(r.sphere_area, 2.0 * kPi * kPi, 1e-13);
  EXPECT_NEAR(r.fiber_length, 2.0 * kPi, 1e-13);
  EXPECT_EQ(r.fibration, "trivial");
  EXPECT_EQ(r.radii, kSchedule.radii());
}

TEST(Masses, WorkerCountIsBitwiseReproducible) {
  const auto g = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}});
  MassOptions one, four;
  four.workers = 4;
  const auto a = mass_gb(g, kSchedule, kQuad, one);
  const auto b = mass_gb(g, kSchedule, kQuad, four);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.extrapolated, b.extrapolated);
}

TEST(Masses, NodeDoublingIsBelowRounding) {
  for (const auto& g : {schwarzschild(4, 1.0), schwarzschild(5, 1.0, "area"),
                        zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1}}),
                        zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 2}})}) {
    auto f = [&](const FramePoint& p) { return gb_integrand_radial(g.model, g.metric, p); };
    const double a = boundary_integral(f, g.model, 16.0, kQuad);
    const double b = boundary_integral(f, g.model, 16.0, kQuad.doubled());
    EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a))) << g.family;
  }
}

TEST(Masses, SpectralConvergenceOffCenter) {
  // Translating the metric breaks the symmetry of the boundary spheres.
  const auto g = schwarzschild(4, 1.0);
  const auto t = translated(g.metric, {3.0, 1.0, 2.0});
  auto f = [&](const FramePoint& p) { return gb_integrand_radial(g.model, t, p); };
  const double ref = boundary_integral(f, g.model, 16.0, {48, 48, 8});
  double prev = std::abs(boundary_integral(f, g.model, 16.0, {4, 4, 8}) - ref);
  for (int n : {8, 16}) {
    const double e = std::abs(boundary_integral(f, g.model, 16.0, {n, n, 8}) - ref);
    if (prev > 1e-11 * std::abs(ref)) EXPECT_GE(prev / std::max(e, 1e-300), 10.0) << n;
    prev = e;
  }
}

TEST(Masses, TranslationInvariance) {
  const auto g = schwarzschild(4, 1.0);
  const auto r = mass_gb(g.model, translated(g.metric, {3.0, 1.0, 2.0}), kSchedule, kQuad);
  EXPECT_NEAR(r.extrapolated, 1.5, 1e-3);
}

TEST(Masses, AitkenAgreesWithTheFit) {
  // Aitken on the last three radii is dominated by the R^{-2p} term, so it is
  // compared at the acceptance tolerance rather than against the fit RMS.
  for (const auto& g : {schwarzschild(4, 1.0), schwarzschild(4, 1.0, "area"), schwarzschild(5, 1.0),
                        zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1}}),
                        zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}})}) {
    const auto r = mass_gb(g, kSchedule, kQuad);
    EXPECT_LT(std::abs(r.aitken - r.extrapolated), 1e-3 * std::max(1.0, std::abs(r.extrapolated)))
        << g.family;
  }
}

TEST(Masses, OscillatingFamilyIsNonConvergent) {
  const auto g = zoo::make_metric("flat", {{"m", 3}});
  MetricFamily osc = g.metric;
  osc.name = "oscillating";
  osc.exact_derivative = nullptr;
  osc.components = [](const FramePoint& p) {
    const double r = p.radius();
    Matrix m = Matrix::Identity(4, 4);
    const double a = 1.0 + 0.5 * std::sin(std::log2(r) * kPi / 1.0 + 0.5);
    for (int i = 0; i < 3; ++i) m(i, i) += a / r;
    return m;
  };
  try {
    mass_gb(g.model, osc, kSchedule, kQuad);
    FAIL();
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.radii(), kSchedule.radii());
    EXPECT_EQ(e.values().size(), 6u);
  }
}

TEST(QuadraticForm, SchwarzschildIsIsotropic) {
  const auto g = schwarzschild(4, 1.0);
  const auto Q = mass_quadratic_form(g.model, g.metric, kSchedule, kQuad);
  ASSERT_EQ(Q.matrix.rows(), 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(Q.matrix(i, j), i == j ? 0.5 : 0.0, 1e-3);
  EXPECT_LT((Q.matrix - Q.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  const auto gb = mass_gb(g, kSchedule, kQuad);
  EXPECT_NEAR(Q.trace(), gb.extrapolated, 3.0 * (Q.residual.trace() + gb.residual) + 1e-6);
  // Per radius the trace is the GB integral exactly.
  for (std::size_t q = 0; q < Q.radii.size(); ++q) EXPECT_NEAR(Q.per_radius[q].trace(), gb.values[q], 1e-12);
}

TEST(QuadraticForm, FlatIsZeroAndTaubNutTraceIsGb) {
  const auto f = zoo::make_metric("flat", {{"m", 3}});
  EXPECT_EQ(mass_quadratic_form(f.model, f.metric, kSchedule, kQuad).matrix.cwiseAbs().maxCoeff(), 0.0);
  const auto g = zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}});
  const auto Q = mass_quadratic_form(g.model, g.metric, kSchedule, kQuad);
  EXPECT_NEAR(Q.trace(), 3.0, 1e-2);
  EXPECT_NEAR(Q.matrix(0, 0), 1.0, 1e-2);
}

TEST(SimplifiedForm, AgreesAfterIntegrationOverTheFiber) {
  // A fiber-dependent off-diagonal perturbation on the Hopf model makes the
  // dropped (∇_T g)(X_i, T) term nonzero pointwise; it integrates to zero along
  // each fiber, so the boundary integrals coincide.
  const ModelMetric model = ModelMetric::hopf(1, 4.0 * kPi);
  MetricFamily f;
  f.name = "fiber-wave";
  f.components = [L = model.fiber_length()](const FramePoint& p) {
    Matrix g = Matrix::Identity(4, 4);
    const double r = p.radius();
    g(0, 3) = g(3, 0) = 0.5 * (p.x[1] + r) * std::sin(2.0 * kPi * p.t / L) / (r * r);
    g(1, 1) += 1.0 / r;
    return g;
  };
  const auto p = make_point({4.0, 2.0, 5.0}, 1.0);
  EXPECT_GT(std::abs(gb_integrand_radial(model, f, p) - gb_integrand_simplified_radial(model, f, p)), 1e-4);
  for (double R : {10.0, 100.0}) {
    auto a = [&](const FramePoint& q) { return gb_integrand_radial(model, f, q); };
    auto b = [&](const FramePoint& q) { return gb_integrand_simplified_radial(model, f, q); };
    const double ia = boundary_integral(a, model, R, kQuad);
    const double ib = boundary_integral(b, model, R, kQuad);
    EXPECT_LT(std::abs(ia - ib), 1e-9 * std::max(1.0, std::abs(ia))) << R;
  }
}

TEST(Invariance, SchwarzschildCharts) {
  for (auto kind : {MassKind::GaussBonnet, MassKind::Dirac}) {
    const auto r = chart_invariance_check(schwarzschild(4, 1.0, "area"), schwarzschild(4, 1.0), kSchedule,
                                          kQuad, kind);
    EXPECT_LT(r.discrepancy, 1e-3);
  }
}

TEST(Invariance, FiberOriginShiftAndRotatedFrame) {
  const auto g = schwarzschild(4, 1.0);
  MetricFamily shifted = g.metric;
  shifted.components = [base = g.metric.components](FramePoint p) {
    p.t += 0.37;
    return base(p);
  };
  shifted.exact_derivative = [base = g.metric.exact_derivative](FramePoint p) {
    p.t += 0.37;
    return base(p);
  };
  EXPECT_EQ(mass_gb(g.model, shifted, kSchedule, kQuad).values, mass_gb(g, kSchedule, kQuad).values);

  // Flat metric written in a rotated base frame: g = diag(Rᵀ R, 1) = identity up to rounding.
  const auto flat = zoo::make_metric("flat", {{"m", 3}});
  MetricFamily rotated = flat.metric;
  rotated.exact_derivative = nullptr;
  rotated.components = [](const FramePoint&) {
    Matrix Rm = Matrix::Identity(4, 4);
    const double c = std::cos(0.7), s = std::sin(0.7);
    Rm(0, 0) = c;
    Rm(0, 1) = -s;
    Rm(1, 0) = s;
    Rm(1, 1) = c;
    return Matrix(Rm.transpose() * Rm);
  };
  EXPECT_NEAR(mass_gb(flat.model, rotated, kSchedule, kQuad).extrapolated, 0.0, 1e-9);
  EXPECT_NEAR(mass_dirac(flat.model, rotated, kSchedule, kQuad).extrapolated, 0.0, 1e-9);
}
