#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace wavered;

namespace {

CanonicalSystem elliptic(const Expr& h, const Expr& V, unsigned n = 3) {
  CanonicalSystem s;
  s.kind = SystemKind::Elliptic;
  s.h = h;
  s.V = V;
  s.n = n;
  return s;
}

CanonicalSystem hyperbolic(const Expr& h, const Expr& V, const Expr& W, unsigned n = 3) {
  CanonicalSystem s;
  s.kind = SystemKind::Hyperbolic;
  s.h = h;
  s.V = V;
  s.W = W;
  s.n = n;
  return s;
}

CanonicalSystem parabolic(int lambda, const Expr& V, const Expr& W, unsigned n = 3) {
  CanonicalSystem s;
  s.kind = SystemKind::Parabolic;
  s.lambda = lambda;
  s.V = V;
  s.W = W;
  s.n = n;
  return s;
}

CanonicalSystem first_order(const Expr& V, const Expr& W) {
  CanonicalSystem s;
  s.kind = SystemKind::FirstOrder;
  s.V = V;
  s.W = W;
  return s;
}

Expr monomial(const char* var, int d) { return make_pow(variable(var), Rational(d)); }

bool agrees_numerically(const Expr& a, const Expr& b, std::vector<std::string> vars) {
  SamplingBox box = SamplingBox::cube(std::move(vars), -2, 2);
  box.exclude = {a, b};
  return is_zero(a - b, box, {}).zero();
}

}  // namespace

// --- apply_h_operator ------------------------------------------------------------

TEST(ApplyH, QuadraticAnnihilatedByThirdDerivative) {
  EXPECT_TRUE(apply_h_operator(constant(1), "v", parse("v^2"), 3).is_exact_zero());
}

TEST(ApplyH, CubicThirdDerivative) {
  Expr r = apply_h_operator(constant(1), "v", parse("v^3"), 3);
  ASSERT_TRUE(r.is_exact());
  EXPECT_EQ(r.rational(), Rational(6));
}

TEST(ApplyH, EulerOperatorFixedPoint) {
  for (unsigned k = 0; k < 6; ++k) {
    Expr r = apply_h_operator(variable("v"), "v", variable("v"), k);
    EXPECT_EQ(r, variable("v")) << k;
  }
}

TEST(ApplyH, ZeroTimesIsIdentity) {
  Expr f = parse("sin(v)*w");
  EXPECT_EQ(apply_h_operator(parse("v*w"), "v", f, 0), f);
}

TEST(ApplyH, ChainLengthComposition) {
  const Expr h = parse("1 + v^2");
  const Expr f = parse("exp(v)*w + v^3");
  for (unsigned m = 0; m < 4; ++m) {
    Expr direct = apply_h_operator(h, "v", f, m + 1);
    Expr composed = apply_h_operator(h, "v", apply_h_operator(h, "v", f, m), 1);
    EXPECT_EQ(canonicalize(direct), canonicalize(composed));
    EXPECT_TRUE(agrees_numerically(direct, composed, {"v", "w"}));
  }
}

// --- construct_V -------------------------------------------------------------------

TEST(ConstructV, ReciprocalOfSeed) {
  Expr V = construct_V(constant(1), variable("vs"), "vs");
  EXPECT_TRUE(agrees_numerically(V, parse("1/vs"), {"v", "vs"}));
}

TEST(ConstructV, ExponentialSeedGivesConstant) {
  Expr V = construct_V(constant(1), parse("exp(3*v)"), "v");
  EXPECT_TRUE(agrees_numerically(V, constant(3), {"v", "w"}));
}

TEST(ConstructV, ConstantSeedGivesZero) {
  EXPECT_TRUE(construct_V(parse("v*w"), constant(1), "v").is_exact_zero());
}

TEST(ConstructV, ZeroSeedRejected) {
  EXPECT_THROW(construct_V(constant(1), constant(0), "v"), std::invalid_argument);
}

TEST(ConstructV, ScaleFree) {
  const Expr phi = parse("v^3 + w*v + 2");
  for (int k : {-3, 2, 7}) {
    Expr a = construct_V(parse("1 + w^2"), phi, "v");
    Expr b = construct_V(parse("1 + w^2"), constant(k) * phi, "v");
    EXPECT_TRUE(agrees_numerically(a, b, {"v", "w"})) << k;
  }
}

// --- check_theorem1 ---------------------------------------------------------------

TEST(CheckTheorem1, LinearSeedPasses) {
  const Expr phi = variable("vs");
  auto sys = elliptic(constant(1), construct_V(constant(1), phi, "vs"));
  auto rep = check_theorem1(sys, phi);
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
  EXPECT_EQ(rep.label(), "necessary condition satisfied");
  ASSERT_EQ(rep.certificates.size(), 1u);
  const auto& cert = rep.certificates[0];
  EXPECT_EQ(cert.chain.size(), 5u);
  EXPECT_TRUE(cert.symbolically_zero());
  EXPECT_EQ(cert.var, "vs");
}

TEST(CheckTheorem1, ConstantSeedTrivial) {
  const Expr h = parse("1 + v^2 + vs^2");
  auto rep = check_theorem1(elliptic(h, constant(0)), constant(1));
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
}

TEST(CheckTheorem1, ExponentialSeedFailsNilpotency) {
  const Expr phi = parse("exp(vs)");
  auto rep = check_theorem1(elliptic(constant(1), construct_V(constant(1), phi, "vs")), phi);
  EXPECT_EQ(rep.status(), CompatStatus::Violated);
  ASSERT_EQ(rep.conditions.size(), 2u);
  EXPECT_TRUE(rep.conditions[0].result.zero());
  EXPECT_EQ(rep.conditions[1].result.verdict, Verdict::Nonzero);
  EXPECT_NE(rep.label().find("(1 d/dvs)^4 exp(vs) = 0"), std::string::npos) << rep.label();
}

TEST(CheckTheorem1, WrongVFailsForm) {
  auto rep = check_theorem1(elliptic(constant(1), parse("v")), variable("vs"));
  EXPECT_EQ(rep.conditions[0].result.verdict, Verdict::Nonzero);
  EXPECT_EQ(rep.status(), CompatStatus::Violated);
}

TEST(CheckTheorem1, SeedZerosAreExcludedAndListed) {
  const Expr phi = parse("vs - 1");
  auto rep = check_theorem1(elliptic(parse("v"), construct_V(parse("v"), phi, "vs")), phi);
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
  ASSERT_EQ(rep.excluded_sets.size(), 2u);
  EXPECT_EQ(rep.excluded_sets[0], "vs - 1 = 0");
  EXPECT_EQ(rep.excluded_sets[1], "v = 0");
}

TEST(CheckTheorem1, ZeroSeedRejected) {
  EXPECT_THROW(check_theorem1(elliptic(constant(1), constant(0)), parse("vs - vs")),
               std::invalid_argument);
}

// --- check_theorem2 ---------------------------------------------------------------

TEST(CheckTheorem2, PolynomialSeedsPass) {
  const Expr phi = parse("w^2"), psi = variable("v");
  auto sys = hyperbolic(constant(1), construct_V(constant(1), phi, "w"),
                        construct_V(constant(1), psi, "v"));
  EXPECT_TRUE(agrees_numerically(sys.V, parse("2/w"), {"v", "w"}));
  EXPECT_TRUE(agrees_numerically(*sys.W, parse("1/v"), {"v", "w"}));
  auto rep = check_theorem2(sys, phi, psi);
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
  EXPECT_EQ(rep.certificates.size(), 2u);
}

TEST(CheckTheorem2, UnitSeedsPass) {
  auto rep = check_theorem2(hyperbolic(parse("v + w"), constant(0), constant(0)), constant(1),
                            constant(1));
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
}

TEST(CheckTheorem2, BilinearHFails) {
  const Expr h = parse("v*w");
  const Expr phi = variable("w"), psi = variable("v");
  auto sys = hyperbolic(h, construct_V(h, phi, "w"), construct_V(h, psi, "v"), 1);
  auto rep = check_theorem2(sys, phi, psi);
  EXPECT_EQ(rep.status(), CompatStatus::Violated);
  const auto& cert = rep.certificates[0];
  EXPECT_EQ(cert.var, "v");
  ASSERT_EQ(cert.chain.size(), 3u);
  EXPECT_TRUE(agrees_numerically(cert.chain[2], parse("v*w^2"), {"v", "w"}));
  EXPECT_EQ(cert.verdict.verdict, Verdict::Nonzero);
}

// --- check_theorem3 ---------------------------------------------------------------

TEST(CheckTheorem3, CubicSeedPasses) {
  const Expr phi = parse("v^3 + w*v");
  auto sys = parabolic(-1, construct_V(constant(-1), phi, "v"), constant(0));
  EXPECT_TRUE(agrees_numerically(sys.V, parse("-(3*v^2 + w)/(v^3 + w*v)"), {"v", "w"}));
  auto rep = check_theorem3(sys, phi);
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
  EXPECT_TRUE(rep.certificates[0].symbolically_zero());
}

TEST(CheckTheorem3, UnitSeedPasses) {
  auto rep = check_theorem3(parabolic(1, constant(0), constant(0)), constant(1));
  EXPECT_EQ(rep.status(), CompatStatus::NecessaryConditionSatisfied);
}

TEST(CheckTheorem3, NonzeroWFails) {
  for (const char* phi : {"1", "v", "v^2 + w"}) {
    const Expr seed = parse(phi);
    auto rep = check_theorem3(parabolic(1, construct_V(constant(1), seed, "v"), variable("v")), seed);
    EXPECT_EQ(rep.status(), CompatStatus::Violated) << phi;
    EXPECT_EQ(rep.label(), "necessary condition violated: W = 0") << phi;
  }
}

TEST(CheckTheorem3, LambdaValidated) {
  auto sys = parabolic(2, constant(0), constant(0));
  EXPECT_THROW(check_theorem3(sys, constant(1)), std::invalid_argument);
}

// --- First-order system -------------------------------------------------------------

TEST(FirstOrder, ZeroPasses) {
  EXPECT_EQ(check_first_order(first_order(constant(0), constant(0))).status(),
            CompatStatus::NecessaryConditionSatisfied);
}

TEST(FirstOrder, NonzeroVFails) {
  EXPECT_EQ(check_first_order(first_order(variable("v"), constant(0))).status(),
            CompatStatus::Violated);
}

TEST(FirstOrder, IdentityZeroPasses) {
  EXPECT_EQ(check_first_order(first_order(parse("sin(v)^2 + cos(v)^2 - 1"), constant(0))).status(),
            CompatStatus::NecessaryConditionSatisfied);
}

// --- validation -------------------------------------------------------------------

TEST(CanonicalSystem, VariableUsageMatchesKind) {
  EXPECT_THROW(elliptic(constant(1), variable("w")).validate(), std::invalid_argument);
  EXPECT_THROW(hyperbolic(constant(1), variable("vs"), constant(0)).validate(), std::invalid_argument);
  auto sys = elliptic(constant(1), constant(0));
  sys.n = 0;
  EXPECT_THROW(sys.validate(), std::invalid_argument);
}

TEST(CanonicalSystem, KindMismatchRejected) {
  EXPECT_THROW(check_theorem2(elliptic(constant(1), constant(0)), constant(1), constant(1)),
               std::invalid_argument);
}

// --- polynomial closure -----------------------------------------------------------

TEST(PolynomialClosure, DegreeBoundary) {
  for (unsigned n = 1; n <= 3; ++n) {
    for (int d = 0; d <= 4; ++d) {
      const bool expect_pass = d <= static_cast<int>(n);
      const Expr one = constant(1);

      Expr p1 = monomial("vs", d);
      auto r1 = check_theorem1(elliptic(one, construct_V(one, p1, "vs"), n), p1);

      Expr phi = monomial("w", d), psi = monomial("v", d);
      auto r2 = check_theorem2(
          hyperbolic(one, construct_V(one, phi, "w"), construct_V(one, psi, "v"), n), phi, psi);

      Expr p3 = monomial("v", d);
      auto r3 = check_theorem3(parabolic(1, construct_V(one, p3, "v"), constant(0), n), p3);

      for (const auto* rep : {&r1, &r2, &r3}) {
        EXPECT_EQ(rep->status() == CompatStatus::NecessaryConditionSatisfied, expect_pass)
            << "n=" << n << " d=" << d << " " << system_kind_name(rep->kind);
        for (const auto& cert : rep->certificates) {
          EXPECT_EQ(cert.chain.size(), n + 2);
          // Symbolic chain and sampled verdict agree.
          EXPECT_EQ(cert.symbolically_zero(), expect_pass);
          EXPECT_EQ(cert.verdict.zero(), expect_pass);
        }
      }
    }
  }
}

TEST(Reporting, NeverClaimsCompatibility) {
  auto rep = check_first_order(first_order(constant(0), constant(0)));
  EXPECT_EQ(rep.label().find("compatible"), std::string::npos);
  EXPECT_NE(rep.label().find("necessary"), std::string::npos);
}
