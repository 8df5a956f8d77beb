#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace wavered;

namespace {

SamplingBox yz_box(double ylo, double yhi, double zlo, double zhi) {
  SamplingBox b;
  b.vars = {"y", "z"};
  b.lo = {ylo, zlo};
  b.hi = {yhi, zhi};
  return b;
}

ClosedFormSolution from_expr(const char* text, SamplingBox box) {
  ClosedFormSolution s;
  s.name = text;
  s.expr = parse(text);
  s.validity = std::move(box);
  return s;
}

// Random smooth phi(y, z) built from the x-space generator.
Expr random_phi(SampleRng& rng) {
  Expr e = wavered::testing::random_smooth_expr(rng, 3);
  const Expr y = variable("y"), z = variable("z");
  return substitute(e, Substitution{{"x0", y}, {"x1", z}, {"x2", y * z}, {"x3", y - z}});
}

}  // namespace

// --- lift_closed_form -----------------------------------------------------------

TEST(LiftClosedForm, StaticKinkInFourDimensions) {
  auto r = lift_closed_form(catalog_entry(1).spec, kink_solution(0.0), parse("sin(u)"));
  EXPECT_EQ(r.samples_used, 500u);
  EXPECT_EQ(r.samples_rejected, 0u);
  EXPECT_FALSE(r.undecided);
  EXPECT_LT(r.max, 1e-9);
  EXPECT_LE(r.mean, r.max);
  EXPECT_EQ(r.worst_point.size(), 4u);
}

TEST(LiftClosedForm, LiouvilleExponentialSeeds) {
  auto sol = liouville_solution(parse("exp(t)"), parse("exp(t)"), SamplingBox::cube({"y", "z"}, -3, 3));
  auto r = lift_closed_form(catalog_entry(1).spec, sol, parse("exp(u)"));
  EXPECT_TRUE(r.passed(1e-9)) << r.max;
}

TEST(LiftClosedForm, SphericalWave) {
  auto sol = from_expr("sin(z - y)/z", yz_box(-3, 3, 0.1, 4));
  auto r = lift_closed_form(catalog_entry(2).spec, sol, constant(0));
  EXPECT_FALSE(r.undecided);
  EXPECT_LT(r.max, 1e-9);
}

TEST(LiftClosedForm, WrongRightHandSideIsVisible) {
  auto r = lift_closed_form(catalog_entry(1).spec, kink_solution(0.0), parse("exp(u)"));
  EXPECT_GT(r.max, 1e-2);
}

TEST(LiftClosedForm, MostlyOutsideValidityIsUndecided) {
  auto sol = liouville_solution(parse("t"), parse("t"), yz_box(0.2, 3, -3, 3));
  auto r = lift_closed_form(catalog_entry(1).spec, sol, parse("exp(u)"));
  EXPECT_TRUE(r.undecided);
  EXPECT_GT(r.samples_rejected, 50u);
  EXPECT_LT(r.max, 1e-9);  // where it was evaluated, it is a solution
}

TEST(LiftClosedForm, DeterministicUnderSeed) {
  LiftOptions o;
  o.seed = 42;
  o.samples = 100;
  auto sol = kink_solution(0.5);
  auto a = lift_closed_form(catalog_entry(1).spec, sol, parse("sin(u)"), o);
  set_thread_limit(3);
  auto b = lift_closed_form(catalog_entry(1).spec, sol, parse("sin(u)"), o);
  set_thread_limit(1);
  EXPECT_EQ(a.max, b.max);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.worst_point, b.worst_point);
}

TEST(LiftClosedForm, RightHandSideVariablesChecked) {
  EXPECT_THROW(lift_closed_form(catalog_entry(1).spec, kink_solution(0.0), parse("sin(x0)")),
               std::invalid_argument);
}

// --- reduced_residual -----------------------------------------------------------

TEST(ReducedResidual, KinkOnPlaneWaveEquation) {
  auto r = reduced_residual(catalog_entry(1).equation, kink_solution(0.0), parse("sin(phi)"));
  EXPECT_TRUE(r.passed(1e-10));
}

TEST(ReducedResidual, HarmonicOnEllipticEquation) {
  auto r = reduced_residual(catalog_entry(3).equation, from_expr("y^2 - z^2", yz_box(-2, 2, -2, 2)),
                            constant(0));
  EXPECT_EQ(r.max, 0.0);
}

TEST(ReducedResidual, LogarithmOnCylindricalEquation) {
  auto r = reduced_residual(catalog_entry(4).equation, from_expr("ln(y)", yz_box(0.1, 3, -2, 2)),
                            constant(0));
  EXPECT_TRUE(r.passed(1e-12)) << r.max;
}

TEST(ReducedResidual, BoxOverride) {
  LiftOptions o;
  o.box = yz_box(-1, 1, -1, 1);
  auto r = reduced_residual(catalog_entry(1).equation, kink_solution(0.0), parse("sin(phi)"), o);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_GE(r.worst_point[i], -1.0);
    EXPECT_LE(r.worst_point[i], 1.0);
  }
}

// --- equivalence ------------------------------------------------------------------

TEST(Equivalence, LiftedEqualsReducedAtMatchedPoints) {
  SampleRng rng(123);
  const Expr F = parse("sin(phi)");
  for (const char* seed_fn : {"square", "cubic"}) {
    for (const auto& entry : catalog(canonical_frame(), seed_fn)) {
      for (int k = 0; k < 10; ++k) {
        const Expr phi = random_phi(rng);
        const Expr u = compose(entry.spec, phi);
        for (int i = 0; i < 100; ++i) {
          auto x = entry.spec.domain.draw_valid(rng, entry.spec.opaque);
          ASSERT_TRUE(x);
          Binding b = entry.spec.domain.bind(*x);
          const double yv = evaluate(entry.spec.y, b, entry.spec.opaque);
          const double zv = evaluate(entry.spec.z, b, entry.spec.opaque);
          const double lifted = lifted_residual_at(entry.spec, u, F, *x);
          const double reduced = reduced_residual_at(entry.equation, phi, F, yv, zv);
          EXPECT_TRUE(wavered::testing::rel_close(lifted, reduced, 1e-8))
              << "entry " << entry.index << " phi " << to_string(phi) << ": " << lifted
              << " vs " << reduced;
        }
      }
    }
  }
}

// --- lift_grid ----------------------------------------------------------------------

TEST(LiftGrid, KinkGridOnPlaneWave) {
  const auto kink = kink_solution(0.0);
  const Expr dphi = diff(kink.expr, "y");
  Wave1p1Problem p;
  p.F = parse("sin(phi)");
  p.phi0 = [&](double z) { return evaluate(kink.expr, Binding{{"y", 0.0}, {"z", z}}); };
  p.dphi0 = [&](double z) { return evaluate(dphi, Binding{{"y", 0.0}, {"z", z}}); };
  p.z_min = -10;
  p.z_max = 10;
  p.hz = 0.05;
  p.hy = 0.025;
  p.T = 1.0;
  p.boundary = BoundaryKind::Dirichlet;
  p.dirichlet = [&](double y, double z) { return evaluate(kink.expr, Binding{{"y", y}, {"z", z}}); };
  auto grid = solve_wave_1p1(p);

  AnsatzSpec spec = catalog_entry(1).spec;
  spec.domain.lo[0] = 0.0;
  spec.domain.hi[0] = 1.0;
  auto r = lift_grid(spec, grid, parse("sin(u)"));
  EXPECT_TRUE(r.passed()) << r.residual.max;
  EXPECT_GT(r.residual.samples_used, 400u);
}

TEST(LiftGrid, LogarithmOnCylindricalAnsatz) {
  RadialOdeProblem p;
  p.F = constant(0);
  p.y0 = 0.3;
  p.y1 = 3.0;
  p.phi0 = std::log(0.3);
  p.dphi0 = 1.0 / 0.3;
  auto grid = radial_to_grid(solve_radial_ode(p), -5, 5, 11);

  AnsatzSpec spec = catalog_entry(4).spec;
  spec.domain = coordinate_box(-2, 2);
  spec.domain.lo[1] = spec.domain.lo[2] = 0.3;  // y = sqrt(x1^2 + x2^2) >= 0.42
  spec.domain.hi[1] = spec.domain.hi[2] = 2.0;
  GridLiftOptions o;
  o.tol = 1e-4;
  auto r = lift_grid(spec, grid, constant(0), o);
  EXPECT_TRUE(r.passed()) << r.residual.max;
  EXPECT_EQ(r.residual.samples_rejected, 0u);
}

TEST(LiftGrid, ConstantGridIsExact) {
  GridSolution g;
  g.y_min = -3;
  g.z_min = -3;
  g.hy = g.hz = 0.1;
  g.ny = g.nz = 61;
  g.values.assign(g.ny * g.nz, 1.5);
  auto r = lift_grid(catalog_entry(1).spec, g, constant(0));
  EXPECT_LT(r.residual.max, 1e-12);
  EXPECT_EQ(r.residual.samples_used, 500u);
}

TEST(LiftGrid, OutOfGridSamplesAreCounted) {
  GridSolution g;
  g.y_min = 0;
  g.z_min = 0;
  g.hy = g.hz = 0.1;
  g.ny = g.nz = 21;
  g.values.assign(g.ny * g.nz, 0.0);
  auto r = lift_grid(catalog_entry(1).spec, g, constant(0));
  EXPECT_GT(r.residual.samples_rejected, 0u);
  EXPECT_EQ(r.residual.samples_used + r.residual.samples_rejected, 500u);
}

TEST(GridInterpolant, ReproducesCubicsAndDerivatives) {
  GridSolution g;
  g.y_min = -1;
  g.z_min = 0;
  g.hy = 0.05;
  g.hz = 0.04;
  g.ny = 41;
  g.nz = 51;
  g.values.resize(g.ny * g.nz);
  auto f = [](double y, double z) { return y * y * z - 0.5 * z * z + y; };
  for (std::size_t i = 0; i < g.ny; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) g.at(i, j) = f(g.y(i), g.z(j));
  GridInterpolant in(g);
  SampleRng rng(5);
  for (int k = 0; k < 50; ++k) {
    const double y = rng.uniform(-0.9, 0.9), z = rng.uniform(0.1, 1.9);
    ASSERT_TRUE(in.covers(y, z));
    auto d = in.sample(y, z);
    EXPECT_NEAR(d[GridInterpolant::kPhi], f(y, z), 1e-12);
    EXPECT_NEAR(d[GridInterpolant::kY], 2 * y * z + 1, 1e-10);
    EXPECT_NEAR(d[GridInterpolant::kZ], y * y - z, 1e-10);
    EXPECT_NEAR(d[GridInterpolant::kYY], 2 * z, 1e-9);
    EXPECT_NEAR(d[GridInterpolant::kYZ], 2 * y, 1e-9);
    EXPECT_NEAR(d[GridInterpolant::kZZ], -1.0, 1e-9);
  }
  EXPECT_FALSE(in.covers(-1.0, 1.0));
}
