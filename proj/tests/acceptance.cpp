// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "alf/alf.hpp"

using namespace alf;

namespace {

const RadiusSchedule kSchedule{16.0, 2.0, 6};
const QuadratureSpec kQuad{};

struct Criterion {
  std::string id;
  std::string title;
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) { return io::fmt(v); }

zoo::AlfMetric schwarzschild(int n, double gamma, const std::string& chart = "isotropic") {
  return zoo::make_metric("schwarzschild", {{"n", n}, {"gamma", gamma}}, chart);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

RicciResult ricci_at(const zoo::AlfMetric& g, const std::vector<double>& x, double t, double step = 0.0) {
  const auto p = regular_patch(g.model, make_point(x, t));
  std::vector<double> y = p.x;
  y.push_back(p.t);
  const auto cm = coordinate_metric(g.model, g.metric, p.patch);
  return step > 0 ? ricci_fd(cm, y, step) : ricci_fd(cm, y);
}

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

void ac1(Criterion& c) {
  const auto g = schwarzschild(4, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = mass_dirac(g, kSchedule, kQuad);
  const auto gb = mass_gb(g, kSchedule, kQuad);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.check(near(d.extrapolated, 1.0, 1e-3), "dirac " + fmt(d.extrapolated));
  c.check(near(gb.extrapolated, 1.5, 1e-3), "gb " + fmt(gb.extrapolated));
  c.check(secs < 10.0, "runtime " + fmt(secs) + " s");
  c.detail = c.detail.empty() ? "dirac " + fmt(d.extrapolated) + ", gb " + fmt(gb.extrapolated) + ", " +
                                    fmt(secs) + " s"
                              : c.detail;
}

void ac2(Criterion& c) {
  const auto g = schwarzschild(5, 1.0);
  const auto d = mass_dirac(g, kSchedule, kQuad);
  const auto gb = mass_gb(g, kSchedule, kQuad);
  c.check(near(d.extrapolated, 1.0, 1e-3), "dirac " + fmt(d.extrapolated));
  c.check(near(gb.extrapolated, 2.0, 1e-3), "gb " + fmt(gb.extrapolated));
  if (c.pass) c.detail = "dirac " + fmt(d.extrapolated) + ", gb " + fmt(gb.extrapolated);
}

void ac3(Criterion& c) {
  const auto iso = zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1.0}});
  const auto area = zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1.0}}, "area");
  const auto d = mass_dirac(iso, kSchedule, kQuad);
  c.check(near(d.extrapolated, -1.0, 1e-3), "dirac " + fmt(d.extrapolated));
  double worst_scal = 0.0, worst_rel = 0.0;
  for (double r : {5.0, 10.0, 20.0}) {
    const auto res = ricci_at(area, {0.48 * r, 0.6 * r, 0.64 * r}, 0.4);
    worst_scal = std::max(worst_scal, std::abs(res.scalar));
    const double e = 1.0 / (r * r * r * r);
    const double expected[4] = {-e, -e, e, e};
    for (int i = 0; i < 4; ++i) worst_rel = std::max(worst_rel, std::abs(res.eigenvalues[i] - expected[i]) / e);
  }
  c.check(worst_scal < 1e-5, "|Scal| " + fmt(worst_scal));
  c.check(worst_rel < 1e-4, "eigenvalue rel. error " + fmt(worst_rel));
  if (c.pass)
    c.detail = "dirac " + fmt(d.extrapolated) + ", max|Scal| " + fmt(worst_scal) + ", eig rel " + fmt(worst_rel);
}

void ac4(Criterion& c) {
  const auto k1 = mass_gb(zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}}), kSchedule, kQuad);
  const auto k2 = mass_gb(zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 2}}), kSchedule, kQuad);
  c.check(near(k1.extrapolated, 3.0, 1e-2), "k=1 " + fmt(k1.extrapolated));
  c.check(near(k2.extrapolated, 6.0, 2e-2), "k=2 " + fmt(k2.extrapolated));
  if (c.pass) c.detail = "k=1 " + fmt(k1.extrapolated) + ", k=2 " + fmt(k2.extrapolated);
}

void ac5(Criterion& c) {
  double worst = 0.0;
  for (auto kind : {MassKind::GaussBonnet, MassKind::Dirac}) {
    const auto r = chart_invariance_check(schwarzschild(4, 1.0, "area"), schwarzschild(4, 1.0), kSchedule, kQuad, kind);
    worst = std::max(worst, r.discrepancy);
  }
  c.check(worst < 1e-3, "|delta| " + fmt(worst));
  if (c.pass) c.detail = "max |delta| " + fmt(worst);
}

void ac6(Criterion& c) {
  const RadialGrid grid{};
  double apply_worst = 0.0, mid_worst = 0.0, outer_worst = 0.0;
  for (int m : {3, 4, 5})
    for (int j = 0; j <= 3; ++j) {
      const auto d = indicial_data(j, m);
      const RadialProfile zero{grid, std::vector<double>(grid.n_points, 0.0), j, 0};
      for (double nu : {d.nu_plus, d.nu_minus}) {
        const auto u = sample_profile(grid, [nu](double r) { return std::pow(r, nu); }, j);
        apply_worst = std::max(apply_worst, relative_residual(u, zero, m, j, 0, 1.0));
      }
      const auto fm = sample_profile(grid, [](double r) { return std::pow(r, -1.5); }, j);
      mid_worst = std::max(mid_worst, relative_residual(green_mid(m, j, grid.r(0), fm), fm, m, j, 0, 1.0));
      const double b = d.nu_minus - 1.5;
      const auto fo = sample_profile(grid, [b](double r) { return std::pow(r, b - 2); }, j);
      outer_worst = std::max(outer_worst, relative_residual(green_outer(m, j, fo), fo, m, j, 0, 1.0));
    }
  c.check(apply_worst < 1e-6, "radial_apply residual " + fmt(apply_worst));
  c.check(mid_worst < 1e-6, "green_mid residual " + fmt(mid_worst));
  c.check(outer_worst < 1e-6, "green_outer residual " + fmt(outer_worst));

  int cases = 0, correct = 0;
  for (int m : {3, 4, 5})
    for (int a = -3; a <= 1; ++a) {
      const auto u = sample_profile(grid, [a](double r) { return std::pow(r, a); });
      const double edge = 0.5 * m + a;
      const std::pair<double, Membership> checks[3] = {
          {edge + 0.25, Membership::Member}, {edge - 0.25, Membership::Divergent}, {edge, Membership::LogDivergent}};
      for (const auto& [delta, expected] : checks) {
        ++cases;
        if (classify_membership(u, delta, m).verdict == expected) ++correct;
      }
    }
  c.check(correct == cases, "membership " + std::to_string(correct) + "/" + std::to_string(cases));

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> centre(std::log(4.0), std::log(100.0)), width(0.15, 0.5), amp(-1.0, 1.0),
      weight(-1.0, 3.0);
  std::uniform_int_distribution<int> dims(3, 5);
  const Cutoff chi{std::log(2.0), std::log(3.0)};
  double hardy_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = dims(rng);
    double delta = weight(rng);
    if (std::abs(m - 2.0 * delta) < 0.05) delta += 0.1;
    double cs[4], ws[4], as[4];
    for (int q = 0; q < 4; ++q) {
      cs[q] = centre(rng);
      ws[q] = width(rng);
      as[q] = amp(rng);
    }
    const auto v = sample_profile(grid, [&](double r) {
      const double s = std::log(r);
      double x = 0.0;
      for (int q = 0; q < 4; ++q) x += as[q] * std::exp(-std::pow((s - cs[q]) / ws[q], 2));
      return x;
    });
    hardy_worst = std::max(hardy_worst, hardy_ratio(v, delta, m, chi));
  }
  c.check(hardy_worst <= 1.0 + 1e-6, "Hardy ratio " + fmt(hardy_worst));
  if (c.pass)
    c.detail = "residuals " + fmt(apply_worst) + " / " + fmt(mid_worst) + " / " + fmt(outer_worst) + ", membership " +
               std::to_string(correct) + "/" + std::to_string(cases) + ", max Hardy " + fmt(hardy_worst);
}

void ac7(Criterion& c) {
  double worst = 0.0;
  for (int m : {3, 4, 5}) {
    const ModelMetric model = ModelMetric::trivial(m, 2.0);
    const double hi = 0.5 * m + 0.3, lo = 2.0 - (0.5 * m + 1.0) - 0.3;
    const std::vector<std::tuple<int, int, double>> planted{{0, -1, 1.25}, {1, -1, -0.75}, {0, 1, 0.5}};
    std::vector<ScalarField> parts;
    for (const auto& [j, s, coef] : planted) parts.push_back(indicial_field(m, j, s, coef));
    const auto e = decay_jump_expand(model, sum_fields(parts), hi, lo, 2);
    c.check(e.terms.size() == planted.size(), "m=" + std::to_string(m) + ": " + std::to_string(e.terms.size()) + " terms");
    for (const auto& [j, s, coef] : planted) {
      double got = std::nan("");
      for (const auto& t : e.terms)
        if (t.j == j && t.sign == s) got = t.coefficient;
      const double rel = std::abs(got - coef) / std::abs(coef);
      worst = std::isnan(rel) ? 1.0 : std::max(worst, rel);
    }
  }
  c.check(worst < 1e-5, "coefficient rel. error " + fmt(worst));
  double slope_margin = -1e300;
  for (int k : {1, 2}) {
    const double L = 1.0;
    const ModelMetric model = ModelMetric::trivial(3, L);
    const auto e = decay_jump_expand(model, fiber_mode_field(3, 0, k, L, 1.0), 1.6, 0.4, 3);
    const double kappa = 2.0 * kPi * k / L;
    c.check(e.terms.empty(), "k=" + std::to_string(k) + " expansion not empty");
    c.check(e.exponential_slope <= -kappa * 0.95, "k=" + std::to_string(k) + " slope " + fmt(e.exponential_slope));
    slope_margin = std::max(slope_margin, e.exponential_slope / kappa);
  }
  if (c.pass) c.detail = "max rel. error " + fmt(worst) + ", worst slope/kappa " + fmt(slope_margin);
}

void ac8(Criterion& c) {
  double min_ratio = 1e300;
  const std::vector<std::pair<zoo::AlfMetric, std::vector<double>>> cases{
      {schwarzschild(4, 1.0), {3.0, 1.0, 2.0}},
      {zoo::make_metric("reissner-nordstrom", {{"mass-param", -0.5}, {"charge", 1.0}}), {-2.0, 2.5, 1.0}},
      {zoo::make_metric("taub-nut", {{"mass-param", 1}, {"monopole-k", 1}}), {2.0, -1.0, 0.0}}};
  for (const auto& [g, shift] : cases) {
    // Off-center presentation: the boundary spheres no longer share the metric's symmetry.
    const auto t = translated(g.metric, shift);
    auto f = [&, &model = g.model](const FramePoint& p) { return gb_integrand_radial(model, t, p); };
    const double ref = boundary_integral(f, g.model, 16.0, {48, 48, 8});
    double prev = std::abs(boundary_integral(f, g.model, 16.0, {4, 4, 8}) - ref);
    for (int n : {8, 16}) {
      const double e = std::abs(boundary_integral(f, g.model, 16.0, {n, n, 8}) - ref);
      if (prev > 1e-11 * std::abs(ref)) min_ratio = std::min(min_ratio, prev / std::max(e, 1e-300));
      prev = e;
    }
  }
  c.check(min_ratio >= 10.0, "quadrature ratio " + fmt(min_ratio));

  const auto rn = zoo::make_metric("reissner-nordstrom", {{"mass-param", 0.0}, {"charge", 1.0}}, "area");
  auto err = [&](double h) {
    const auto res = ricci_at(rn, {1.2, 0.0, 1.6}, 0.3, h);
    return std::abs(res.eigenvalues[3] - 1.0 / 16.0);
  };
  const double fd_ratio = err(0.2) / err(0.1);
  c.check(fd_ratio >= 3.5, "FD ratio " + fmt(fd_ratio));
  if (c.pass) c.detail = "min quadrature ratio " + fmt(min_ratio) + ", FD halving ratio " + fmt(fd_ratio);
}

}  // namespace

int main() {
  const std::vector<std::tuple<std::string, std::string, std::function<void(Criterion&)>>> all{
      {"AC1", "Schwarzschild n=4 masses and runtime", ac1},
      {"AC2", "Schwarzschild n=5 masses", ac2},
      {"AC3", "Reissner-Nordstrom mass and curvature", ac3},
      {"AC4", "Taub-NUT masses", ac4},
      {"AC5", "chart invariance", ac5},
      {"AC6", "mode suite", ac6},
      {"AC7", "decay-jump suite", ac7},
      {"AC8", "convergence orders", ac8}};
  int failed = 0;
  for (const auto& [id, title, fn] : all) {
    Criterion c{id, title};
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s (%s)\n", c.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), c.detail.c_str());
    if (!c.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
