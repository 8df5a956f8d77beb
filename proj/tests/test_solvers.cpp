#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace wavered;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double max_error(const GridSolution& g, const Field2& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < g.ny; ++i)
    for (std::size_t j = 0; j < g.nz; ++j)
      err = std::max(err, std::fabs(g.at(i, j) - exact(g.y(i), g.z(j))));
  return err;
}

// J0 by its power series, summed in long double.
double bessel_j0_series(double y) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = static_cast<long double>(y) * y / 4.0L;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return static_cast<double>(sum);
}

Wave1p1Problem dalembert_problem(std::size_t nz) {
  Wave1p1Problem p;
  p.F = constant(0);
  p.phi0 = [](double z) { return std::sin(z); };
  p.dphi0 = [](double) { return 0.0; };
  p.z_min = 0.0;
  p.z_max = kTwoPi;
  p.hz = kTwoPi / static_cast<double>(nz);
  p.hy = 0.5 * p.hz;
  p.T = 1.0;
  return p;
}

double dalembert_error(std::size_t nz) {
  auto g = solve_wave_1p1(dalembert_problem(nz));
  return max_error(g, [](double y, double z) { return std::sin(z) * std::cos(y); });
}

// Outgoing spherical wave g(z - y)/z with g = sin.
double spherical_exact(double y, double z) { return std::sin(z - y) / z; }

RadialWaveProblem spherical_problem(double hz, bool psi) {
  RadialWaveProblem p;
  p.F = constant(0);
  p.phi0 = [](double z) { return spherical_exact(0.0, z); };
  p.dphi0 = [](double z) { return -std::cos(z) / z; };
  p.z_min = 0.5;
  p.z_max = 2.0;
  p.hz = hz;
  p.hy = 0.5 * hz;
  p.T = 1.0;
  p.dirichlet = spherical_exact;
  p.psi_substitution = psi;
  return p;
}

ClosedFormSolution kink0() { return kink_solution(0.0); }

}  // namespace

// --- solve_wave_1p1 ---------------------------------------------------------------

TEST(Wave1p1, DalembertStandingWave) {
  EXPECT_LT(dalembert_error(256), 1e-3);
}

TEST(Wave1p1, ZeroDataZeroGrid) {
  auto p = dalembert_problem(64);
  p.phi0 = [](double) { return 0.0; };
  auto g = solve_wave_1p1(p);
  ASSERT_TRUE(g.consistent());
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Wave1p1, GridMetadata) {
  auto g = solve_wave_1p1(dalembert_problem(64));
  EXPECT_TRUE(g.consistent());
  EXPECT_TRUE(g.periodic_z);
  EXPECT_EQ(g.nz, 64u);
  EXPECT_EQ(g.meta.scheme, "leapfrog");
  // hy is shortened so that the layers end exactly at T.
  EXPECT_LE(g.meta.cfl, 0.5);
  EXPECT_NEAR(g.meta.cfl, g.hy / g.hz, 1e-15);
  EXPECT_NEAR(g.hy * static_cast<double>(g.ny - 1), 1.0, 1e-12);
  EXPECT_NEAR(g.y_max(), 1.0, 1e-12);
}

TEST(Wave1p1, KinkWithDirichletData) {
  const auto kink = kink_solution(0.5);
  const Expr dphi = diff(kink.expr, "y");
  auto eval_at = [](const Expr& e, double y, double z) { return evaluate(e, Binding{{"y", y}, {"z", z}}); };
  Wave1p1Problem p;
  p.F = parse("sin(phi)");
  p.phi0 = [&](double z) { return eval_at(kink.expr, 0.0, z); };
  p.dphi0 = [&](double z) { return eval_at(dphi, 0.0, z); };
  p.z_min = -10.0;
  p.z_max = 10.0;
  p.hz = 0.05;
  p.hy = 0.025;
  p.T = 1.0;
  p.boundary = BoundaryKind::Dirichlet;
  p.dirichlet = [&](double y, double z) { return eval_at(kink.expr, y, z); };
  auto g = solve_wave_1p1(p);
  EXPECT_LT(max_error(g, [&](double y, double z) { return eval_at(kink.expr, y, z); }), 5e-3);
}

TEST(Wave1p1, SecondOrderConvergence) {
  const double e1 = dalembert_error(32), e2 = dalembert_error(64), e3 = dalembert_error(128);
  EXPECT_GE(e1 / e2, 3.5);
  EXPECT_LE(e1 / e2, 4.5);
  EXPECT_GE(e2 / e3, 3.5);
  EXPECT_LE(e2 / e3, 4.5);
}

TEST(Wave1p1, EnergyDriftOverTenCrossings) {
  auto p = dalembert_problem(256);
  p.phi0 = [](double z) { return std::sin(z) + 0.5 * std::cos(2 * z); };
  p.T = 10.0 * kTwoPi;
  auto g = solve_wave_1p1(p);
  // Energy between layers i and i+1, derivatives centred on the half step.
  auto energy = [&](std::size_t i) {
    double e = 0.0;
    for (std::size_t j = 0; j < g.nz; ++j) {
      const std::size_t jp = (j + 1) % g.nz;
      const double uy = (g.at(i + 1, j) - g.at(i, j)) / g.hy;
      const double uz = 0.5 * ((g.at(i, jp) - g.at(i, j)) * (g.at(i + 1, jp) - g.at(i + 1, j))) /
                        (g.hz * g.hz);
      e += (uy * uy + 2.0 * uz) * g.hz;
    }
    return e;
  };
  const double e0 = energy(0);
  double drift = 0.0;
  for (std::size_t i = 0; i + 1 < g.ny; i += 50) drift = std::max(drift, std::fabs(energy(i) - e0));
  EXPECT_LT(drift / e0, 1e-3);
}

TEST(Wave1p1, CflViolationRejected) {
  auto p = dalembert_problem(64);
  p.hy = 2.0 * p.hz;
  EXPECT_THROW(solve_wave_1p1(p), SolverError);
}

TEST(Wave1p1, BlowUpReportsLastStableLayer) {
  auto p = dalembert_problem(32);
  p.F = parse("phi^3");
  p.phi0 = [](double) { return 10.0; };
  p.T = 5.0;
  try {
    solve_wave_1p1(p);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GE(e.last_stable_layer(), 1);
  }
}

TEST(Wave1p1, DirichletNeedsData) {
  auto p = dalembert_problem(32);
  p.boundary = BoundaryKind::Dirichlet;
  EXPECT_THROW(solve_wave_1p1(p), std::invalid_argument);
}

// --- solve_radial_wave ------------------------------------------------------------

TEST(RadialWave, ExactSolutionHasZeroJetResidual) {
  auto entry = catalog_entry(2);
  const Expr phi = parse("sin(z - y)/z");
  SampleRng rng(6);
  for (int k = 0; k < 100; ++k) {
    const double y = rng.uniform(-2, 2), z = rng.uniform(0.1, 3);
    EXPECT_LT(std::fabs(reduced_residual_at(entry.equation, phi, constant(0), y, z)), 1e-12);
  }
}

TEST(RadialWave, OutgoingSphericalWave) {
  for (bool psi : {false, true}) {
    auto g = solve_radial_wave(spherical_problem(0.01, psi));
    EXPECT_LT(max_error(g, spherical_exact), 1e-3) << (psi ? "psi" : "direct");
  }
}

TEST(RadialWave, StaticPotential) {
  for (bool psi : {false, true}) {
    RadialWaveProblem p;
    p.F = constant(0);
    p.phi0 = [](double z) { return 1.0 / z; };
    p.dphi0 = [](double) { return 0.0; };
    p.z_min = 0.5;
    p.z_max = 3.0;
    p.hz = 0.01;
    p.hy = 0.005;
    p.T = 2.0;
    p.dirichlet = [](double, double z) { return 1.0 / z; };
    p.psi_substitution = psi;
    auto g = solve_radial_wave(p);
    EXPECT_LT(max_error(g, [](double, double z) { return 1.0 / z; }), 1e-3);
  }
}

TEST(RadialWave, ZeroDataZeroGrid) {
  RadialWaveProblem p;
  p.F = constant(0);
  p.phi0 = p.dphi0 = [](double) { return 0.0; };
  p.dirichlet = [](double, double) { return 0.0; };
  auto g = solve_radial_wave(p);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(RadialWave, SecondOrderConvergence) {
  for (bool psi : {false, true}) {
    const double e1 = max_error(solve_radial_wave(spherical_problem(0.04, psi)), spherical_exact);
    const double e2 = max_error(solve_radial_wave(spherical_problem(0.02, psi)), spherical_exact);
    const double e3 = max_error(solve_radial_wave(spherical_problem(0.01, psi)), spherical_exact);
    EXPECT_GE(e1 / e2, 3.5) << psi;
    EXPECT_LE(e1 / e2, 4.5) << psi;
    EXPECT_GE(e2 / e3, 3.5) << psi;
    EXPECT_LE(e2 / e3, 4.5) << psi;
  }
}

TEST(RadialWave, AxisExcluded) {
  auto p = spherical_problem(0.01, false);
  p.z_min = 0.0;
  EXPECT_THROW(solve_radial_wave(p), std::invalid_argument);
}

// --- solve_elliptic ---------------------------------------------------------------

TEST(Elliptic, HarmonicReproduced) {
  EllipticProblem p;
  p.F = constant(0);
  p.boundary = [](double y, double z) { return y * y - z * z; };
  p.relaxation = 1.8;
  auto g = solve_elliptic(p);
  EXPECT_TRUE(g.meta.converged);
  EXPECT_LT(max_error(g, p.boundary), 1e-6);
}

TEST(Elliptic, ManufacturedNonlinearSolution) {
  // phi* = sin y sin z solves -lap phi = -phi^3 + phi*^3 + 2 phi*.
  EllipticProblem p;
  p.F = parse("-phi^3 + (sin(y)*sin(z))^3 + 2*sin(y)*sin(z)");
  p.boundary = [](double y, double z) { return std::sin(y) * std::sin(z); };
  p.relaxation = 1.8;
  auto g = solve_elliptic(p);
  EXPECT_LT(max_error(g, p.boundary), 1e-4);
}

TEST(Elliptic, ZeroBoundaryZeroSolution) {
  EllipticProblem p;
  p.F = constant(0);
  p.boundary = [](double, double) { return 0.0; };
  auto g = solve_elliptic(p);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Elliptic, NonConvergenceCarriesHistory) {
  EllipticProblem p;
  p.F = constant(0);
  p.boundary = [](double y, double z) { return y * y - z * z; };
  p.max_iter = 5;
  try {
    solve_elliptic(p);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.residual_history().size(), 5u);
  }
}

// --- solve_radial_ode -------------------------------------------------------------

TEST(RadialOde, LogarithmReproduced) {
  RadialOdeProblem p;
  p.F = constant(0);
  p.y0 = 1.0;
  p.y1 = 10.0;
  p.phi0 = 0.7;
  p.dphi0 = -1.3;
  auto s = solve_radial_ode(p);
  for (std::size_t k = 0; k < s.y.size(); ++k)
    ASSERT_NEAR(s.phi[k], 0.7 - 1.3 * std::log(s.y[k]), 1e-8) << s.y[k];
}

TEST(RadialOde, BesselFromTheAxis) {
  RadialOdeProblem p;
  p.F = parse("phi");
  p.y0 = 0.0;
  p.y1 = 10.0;
  p.phi0 = 1.0;
  auto s = solve_radial_ode(p);
  EXPECT_NEAR(s.y.back(), 10.0, 1e-12);
  double err = 0.0;
  for (std::size_t k = 0; k < s.y.size(); ++k)
    err = std::max(err, std::fabs(s.phi[k] - bessel_j0_series(s.y[k])));
  EXPECT_LT(err, 1e-6);
}

TEST(RadialOde, SeriesOracleSelfCheck) {
  EXPECT_NEAR(bessel_j0_series(0.0), 1.0, 0.0);
  EXPECT_NEAR(bessel_j0_series(2.404825557695773), 0.0, 1e-14);  // first zero
}

TEST(RadialOde, ConstantStaysConstant) {
  RadialOdeProblem p;
  p.F = constant(0);
  p.phi0 = 2.5;
  auto s = solve_radial_ode(p);
  for (double v : s.phi) EXPECT_EQ(v, 2.5);
}

TEST(RadialOde, AxisStartNeedsZeroSlope) {
  RadialOdeProblem p;
  p.F = constant(0);
  p.y0 = 0.0;
  p.dphi0 = 1.0;
  EXPECT_THROW(solve_radial_ode(p), std::invalid_argument);
}

TEST(RadialOde, OversizedStepNearAxisDetected) {
  RadialOdeProblem p;
  p.F = parse("100*phi");
  p.y0 = 0.0;
  p.phi0 = 1.0;
  p.step = 0.5;
  EXPECT_THROW(solve_radial_ode(p), SolverError);
}

// --- closed forms -----------------------------------------------------------------

TEST(Kink, JetResidualStatic) {
  auto eq = catalog_entry(1).equation;
  auto k = kink0();
  SampleRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform(-20, 20), z = rng.uniform(-20, 20);
    EXPECT_LT(std::fabs(reduced_residual_at(eq, k.expr, parse("sin(phi)"), y, z)), 1e-10);
  }
}

TEST(Kink, JetResidualMoving) {
  auto eq = catalog_entry(1).equation;
  for (double c : {0.5, -0.9}) {
    for (int sign : {1, -1}) {
      auto k = kink_solution(c, sign, 0.3);
      SampleRng rng(2);
      for (int i = 0; i < 200; ++i) {
        const double y = rng.uniform(-20, 20), z = rng.uniform(-20, 20);
        EXPECT_LT(std::fabs(reduced_residual_at(eq, k.expr, parse("sin(phi)"), y, z)), 1e-10);
      }
    }
  }
}

TEST(Kink, Asymptotics) {
  auto k = kink0();
  EXPECT_NEAR(evaluate(k.expr, Binding{{"y", -30}, {"z", 0}}), 0.0, 1e-8);
  EXPECT_NEAR(evaluate(k.expr, Binding{{"y", 30}, {"z", 0}}), kTwoPi, 1e-8);
}

TEST(Kink, SpeedBound) {
  EXPECT_THROW(kink_solution(1.0), std::invalid_argument);
  EXPECT_THROW(kink_solution(-1.5), std::invalid_argument);
}

TEST(Liouville, ExponentialSeeds) {
  auto s = liouville_solution(parse("exp(t)"), parse("exp(t)"), SamplingBox::cube({"y", "z"}, -3, 3));
  auto eq = catalog_entry(1).equation;
  SampleRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform(-3, 3), z = rng.uniform(-3, 3);
    const double lhs = reduced_residual_at(eq, s.expr, parse("exp(phi)"), y, z);
    EXPECT_LT(std::fabs(lhs), 1e-10);
  }
}

TEST(Liouville, LinearSeeds) {
  SamplingBox box;
  box.vars = {"y", "z"};
  box.lo = {0.2, -3};
  box.hi = {3, 3};
  auto s = liouville_solution(parse("t"), parse("t"), box);
  auto eq = catalog_entry(1).equation;
  SampleRng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform(0.2, 3), z = rng.uniform(-3, 3);
    // Closed form reduces to ln(8/(2y)^2).
    EXPECT_NEAR(evaluate(s.expr, Binding{{"y", y}, {"z", z}}), std::log(8.0 / (4 * y * y)), 1e-12);
    EXPECT_LT(std::fabs(reduced_residual_at(eq, s.expr, parse("exp(phi)"), y, z)), 1e-10);
  }
}

TEST(Liouville, SeedVariableChecked) {
  EXPECT_THROW(liouville_solution(parse("y"), parse("t"), SamplingBox::cube({"y", "z"}, -1, 1)),
               std::invalid_argument);
}

TEST(ClosedForm, RelativeResidualOnValidityBox) {
  auto eq = catalog_entry(1).equation;
  std::vector<std::pair<ClosedFormSolution, Expr>> cases{
      {kink_solution(0.0), parse("sin(phi)")},
      {kink_solution(0.9, -1, 1.0), parse("sin(phi)")},
      {liouville_solution(parse("exp(t)"), parse("exp(t)"), SamplingBox::cube({"y", "z"}, -3, 3)),
       parse("exp(phi)")}};
  for (auto& [sol, F] : cases) {
    SampleRng rng(10);
    for (int i = 0; i < 200; ++i) {
      auto p = sol.validity.draw(rng);
      Binding b = sol.validity.bind(p);
      const double scale = std::max(1.0, std::fabs(evaluate(F, Binding{{"phi", evaluate(sol.expr, b)}})));
      EXPECT_LT(std::fabs(reduced_residual_at(eq, sol.expr, F, p[0], p[1])) / scale, 1e-9) << sol.name;
    }
  }
}

TEST(RightHandSide, AcceptsUAndRejectsStrangers) {
  RightHandSide F(parse("sin(u)"));
  EXPECT_DOUBLE_EQ(F(1.0), std::sin(1.0));
  EXPECT_DOUBLE_EQ(F.derivative(1.0), std::cos(1.0));
  EXPECT_THROW(RightHandSide(parse("x0")), std::invalid_argument);
}
