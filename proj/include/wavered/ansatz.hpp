#pragma once

// Reduction of the wave equation by the ansatz u = phi(y, z): the five
// invariants r = y.y, q = y.z, s = z.z, R = box y, S = box z (contractions
// with the Minkowski metric), the elliptic / hyperbolic / parabolic /
// first-order classification by the sign of rs - q^2, coefficient
// verification, and the four-entry ansatz catalog.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavered/diff.hpp"
#include "wavered/eval.hpp"
#include "wavered/expr.hpp"
#include "wavered/minkowski.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

inline const std::vector<std::string>& coordinate_names() {
  static const std::vector<std::string> names{"x0", "x1", "x2", "x3"};
  return names;
}

struct AnsatzSpec {
  Expr y;
  Expr z;
  OpaqueTable opaque;
  /// Builtin names backing entries of `opaque`, kept for serialization.
  std::map<std::string, std::string> opaque_builtins;
  SamplingBox domain = coordinate_box();

  void set_builtin(const std::string& name, const std::string& builtin) {
    opaque[name] = builtin_opaque(builtin);
    opaque_builtins[name] = builtin;
  }

  /// Throws std::invalid_argument when y or z use non-coordinate variables
  /// or reference an opaque function without implementation.
  void validate() const {
    for (const Expr* e : {&y, &z}) {
      for (const auto& v : free_variables(*e))
        if (v.size() != 2 || v[0] != 'x' || v[1] < '0' || v[1] > '3')
          throw std::invalid_argument("ansatz variable '" + v +
                                      "' is not a coordinate x0..x3");
      for (const auto& f : opaque_functions(*e))
        if (!opaque.count(f))
          throw std::invalid_argument("opaque function '" + f + "' has no implementation");
    }
  }
};

/// Coefficients of the reduced equation
///   r phi_yy + 2 q phi_yz + s phi_zz + R phi_y + S phi_z = F(phi)
/// as expressions in (y, z); F (optional) is an expression in phi.
struct ReducedEquation {
  Expr r, q, s, R, S;
  std::optional<Expr> F;

  std::array<const Expr*, 5> coefficients() const { return {&r, &q, &s, &R, &S}; }

  void validate() const {
    for (const Expr* c : coefficients())
      for (const auto& v : free_variables(*c))
        if (v != "y" && v != "z")
          throw std::invalid_argument("reduced coefficient uses '" + v +
                                      "'; only y and z are allowed");
    if (F)
      for (const auto& v : free_variables(*F))
        if (v != "phi")
          throw std::invalid_argument("right-hand side uses '" + v +
                                      "'; only phi is allowed");
  }
};

inline constexpr std::array<const char*, 5> kInvariantNames{"r", "q", "s", "R", "S"};

enum class CaseKind { Elliptic, Hyperbolic, Parabolic, FirstOrder, Mixed };

inline const char* case_name(CaseKind k) {
  switch (k) {
    case CaseKind::Elliptic: return "Elliptic";
    case CaseKind::Hyperbolic: return "Hyperbolic";
    case CaseKind::Parabolic: return "Parabolic";
    case CaseKind::FirstOrder: return "FirstOrder";
    case CaseKind::Mixed: return "Mixed";
  }
  return "?";
}

/// One cell of the grid decomposition used for Mixed classifications. A cell
/// whose own samples disagree is labelled Mixed (it straddles a sign change).
struct RegionCell {
  std::vector<double> lo, hi;
  CaseKind kind;
};

struct Classification {
  CaseKind kind = CaseKind::Mixed;
  int lambda = 0;  // Parabolic family: sign of r + s
  std::vector<RegionCell> regions;
  std::map<CaseKind, std::size_t> counts;
  std::size_t samples_used = 0;
};

struct ReductionResult {
  Expr r, q, s, R, S;  // raw, over x0..x3
  std::optional<ReducedEquation> reduced;
  std::optional<Classification> classification;

  std::array<const Expr*, 5> invariants() const { return {&r, &q, &s, &R, &S}; }
};

// ---------------------------------------------------------------------------
// compute_invariants
// ---------------------------------------------------------------------------

inline Expr minkowski_contract(const std::array<Expr, 4>& u, const std::array<Expr, 4>& v) {
  std::vector<Expr> terms;
  for (int mu = 0; mu < 4; ++mu) {
    Expr t = u[mu] * v[mu];
    terms.push_back(kMetric[mu] > 0 ? t : make_neg(t));
  }
  return make_sum(std::move(terms));
}

inline std::array<Expr, 4> gradient(const Expr& e) {
  std::array<Expr, 4> g;
  for (int mu = 0; mu < 4; ++mu) g[mu] = diff(e, coordinate_names()[mu]);
  return g;
}

/// The d'Alembertian d^2/dx0^2 - d^2/dx1^2 - d^2/dx2^2 - d^2/dx3^2.
inline Expr dalembertian(const Expr& e) {
  std::vector<Expr> terms;
  for (int mu = 0; mu < 4; ++mu) {
    Expr d2 = diff(e, coordinate_names()[mu], 2);
    terms.push_back(kMetric[mu] > 0 ? d2 : make_neg(d2));
  }
  return make_sum(std::move(terms));
}

inline ReductionResult compute_invariants(const AnsatzSpec& spec) {
  spec.validate();
  auto gy = gradient(spec.y);
  auto gz = gradient(spec.z);
  ReductionResult rr;
  rr.r = minkowski_contract(gy, gy);
  rr.q = minkowski_contract(gy, gz);
  rr.s = minkowski_contract(gz, gz);
  rr.R = dalembertian(spec.y);
  rr.S = dalembertian(spec.z);
  return rr;
}

// ---------------------------------------------------------------------------
// depends_only_on_yz
// ---------------------------------------------------------------------------

struct DependenceOptions {
  std::size_t trials = 40;
  std::uint64_t seed = 1;
  double rtol = 1e-7;
};

struct DependenceResult {
  Verdict verdict = Verdict::Undecided;  // Zero: no variation along level sets
  std::vector<double> point_a, point_b;  // witness pair for Nonzero
  double value_a = 0.0, value_b = 0.0;
  std::size_t pairs_found = 0;
  std::size_t attempts = 0;

  bool depends_only() const { return verdict == Verdict::Zero; }
};

namespace detail {

// Moves p onto {y = ty, z = tz} with minimum-norm Gauss-Newton steps.
inline bool project_to_level_set(const AnsatzSpec& spec, std::vector<double>& p, double ty,
                                 double tz) {
  const auto& vars = spec.domain.vars;
  const double scale = std::max({1.0, std::fabs(ty), std::fabs(tz)});
  for (int it = 0; it < 60; ++it) {
    Binding b = spec.domain.bind(p);
    Jet2 jy = eval_jet(spec.y, b, vars, spec.opaque);
    Jet2 jz = eval_jet(spec.z, b, vars, spec.opaque);
    const double ry = jy.value() - ty;
    const double rz = jz.value() - tz;
    if (std::fabs(ry) <= 1e-13 * scale && std::fabs(rz) <= 1e-13 * scale) return true;
    double a = 0, c = 0, d = 0;  // J J^T = [[a, c], [c, d]]
    for (std::size_t i = 0; i < vars.size(); ++i) {
      a += jy.grad(i) * jy.grad(i);
      c += jy.grad(i) * jz.grad(i);
      d += jz.grad(i) * jz.grad(i);
    }
    const double det = a * d - c * c;
    if (!(std::fabs(det) > 1e-14 * std::max(1.0, a * d))) return false;
    const double ly = (d * ry - c * rz) / det;
    const double lz = (-c * ry + a * rz) / det;
    for (std::size_t i = 0; i < vars.size(); ++i)
      p[i] -= ly * jy.grad(i) + lz * jz.grad(i);
  }
  return false;
}

}  // namespace detail

/// Tests whether e(x) is a function of (y(x), z(x)) alone: pairs of distinct
/// points on a common level set of (y, z) must give equal values of e.
inline DependenceResult depends_only_on_yz(const Expr& e, const AnsatzSpec& spec,
                                           const DependenceOptions& opts = {}) {
  DependenceResult res;
  SampleRng rng(opts.seed);
  const auto& box = spec.domain;
  const std::size_t max_attempts = opts.trials * 10;
  double diag = 0.0;
  for (std::size_t i = 0; i < box.dim(); ++i) diag += std::pow(box.hi[i] - box.lo[i], 2);
  diag = std::sqrt(diag);

  while (res.pairs_found < opts.trials && res.attempts < max_attempts) {
    ++res.attempts;
    auto p1 = box.draw_valid(rng, spec.opaque);
    if (!p1) break;
    std::vector<double> p2 = *p1;
    for (std::size_t i = 0; i < box.dim(); ++i)
      p2[i] += 0.25 * (box.hi[i] - box.lo[i]) * rng.uniform(-1.0, 1.0);
    try {
      Binding b1 = box.bind(*p1);
      const double ty = evaluate(spec.y, b1, spec.opaque);
      const double tz = evaluate(spec.z, b1, spec.opaque);
      if (!detail::project_to_level_set(spec, p2, ty, tz)) continue;
      if (!box.contains(p2)) continue;
      Binding b2 = box.bind(p2);
      if (box.is_excluded(b2, spec.opaque)) continue;
      double dist = 0.0;
      for (std::size_t i = 0; i < box.dim(); ++i) dist += std::pow(p2[i] - (*p1)[i], 2);
      if (std::sqrt(dist) < 1e-3 * diag) continue;
      const double v1 = evaluate(e, b1, spec.opaque);
      const double v2 = evaluate(e, b2, spec.opaque);
      ++res.pairs_found;
      if (std::fabs(v1 - v2) > opts.rtol * std::max({1.0, std::fabs(v1), std::fabs(v2)})) {
        res.verdict = Verdict::Nonzero;
        res.point_a = *p1;
        res.point_b = p2;
        res.value_a = v1;
        res.value_b = v2;
        return res;
      }
    } catch (const DomainError&) {
      continue;
    }
  }
  res.verdict = res.pairs_found >= (opts.trials + 1) / 2 ? Verdict::Zero : Verdict::Undecided;
  return res;
}

// ---------------------------------------------------------------------------
// classify_case
// ---------------------------------------------------------------------------

struct ClassifyOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double atol = 1e-10;
  std::size_t grid_resolution = 8;
  std::size_t samples_per_cell = 4;
  OpaqueTable opaque;
};

namespace detail {

struct PointCase {
  bool ok = false;
  CaseKind kind = CaseKind::Mixed;
  int lambda = 0;
};

inline PointCase classify_point(const Expr& r, const Expr& q, const Expr& s, const Binding& b,
                                const OpaqueTable& opaque, double atol) {
  PointCase pc;
  try {
    const double rv = evaluate(r, b, opaque);
    const double qv = evaluate(q, b, opaque);
    const double sv = evaluate(s, b, opaque);
    const double norm = std::sqrt(rv * rv + qv * qv + sv * sv);
    const double disc = rv * sv - qv * qv;
    const double scale = std::max({1.0, std::fabs(rv * sv), qv * qv});
    pc.ok = true;
    if (norm <= atol) {
      pc.kind = CaseKind::FirstOrder;
    } else if (std::fabs(disc) <= atol * scale) {
      pc.kind = CaseKind::Parabolic;
      pc.lambda = (rv + sv) > 0 ? 1 : -1;
    } else {
      pc.kind = disc > 0 ? CaseKind::Elliptic : CaseKind::Hyperbolic;
    }
  } catch (const DomainError&) {
  }
  return pc;
}

}  // namespace detail

/// Sign analysis of rs - q^2 over the box. Uniform sign gives a single case;
/// otherwise the result is Mixed with an axis-aligned grid of labelled cells.
inline Classification classify_case(const Expr& r, const Expr& q, const Expr& s,
                                    const SamplingBox& box, const ClassifyOptions& opts = {}) {
  Classification out;
  SampleRng rng(opts.seed);
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < opts.trials; ++i)
    if (auto p = box.draw_valid(rng, opts.opaque)) points.push_back(std::move(*p));
  std::vector<detail::PointCase> cases(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    cases[i] = detail::classify_point(r, q, s, box.bind(points[i]), opts.opaque, opts.atol);
  });
  std::optional<CaseKind> uniform;
  bool mixed = false;
  int lambda = 0;
  for (const auto& pc : cases) {
    if (!pc.ok) continue;
    ++out.samples_used;
    ++out.counts[pc.kind];
    if (!uniform) {
      uniform = pc.kind;
      lambda = pc.lambda;
    } else if (*uniform != pc.kind) {
      mixed = true;
    } else if (pc.kind == CaseKind::Parabolic && pc.lambda != lambda) {
      mixed = true;
    }
  }
  if (uniform && !mixed) {
    out.kind = *uniform;
    out.lambda = (out.kind == CaseKind::Parabolic) ? lambda : 0;
    return out;
  }
  out.kind = CaseKind::Mixed;
  // Grid decomposition: restrict the classification to sign-constant cells.
  const std::size_t dim = box.dim();
  const std::size_t res = std::max<std::size_t>(opts.grid_resolution, 1);
  std::size_t ncells = 1;
  for (std::size_t d = 0; d < dim; ++d) ncells *= res;
  out.regions.reserve(ncells);
  for (std::size_t cell = 0; cell < ncells; ++cell) {
    SamplingBox sub = box;
    std::size_t idx = cell;
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t k = idx % res;
      idx /= res;
      const double w = (box.hi[d] - box.lo[d]) / static_cast<double>(res);
      sub.lo[d] = box.lo[d] + w * static_cast<double>(k);
      sub.hi[d] = sub.lo[d] + w;
    }
    std::optional<CaseKind> label;
    bool straddles = false;
    for (std::size_t k = 0; k < opts.samples_per_cell; ++k) {
      auto p = sub.draw_valid(rng, opts.opaque, 20);
      if (!p) continue;
      auto pc = detail::classify_point(r, q, s, sub.bind(*p), opts.opaque, opts.atol);
      if (!pc.ok) continue;
      if (!label) label = pc.kind;
      else if (*label != pc.kind) straddles = true;
    }
    if (!label) continue;
    out.regions.push_back({sub.lo, sub.hi, straddles ? CaseKind::Mixed : *label});
  }
  return out;
}

/// Classification of computed invariants over the ansatz domain.
inline Classification classify_case(const ReductionResult& rr, const AnsatzSpec& spec,
                                    ClassifyOptions opts = {}) {
  opts.opaque = spec.opaque;
  return classify_case(rr.r, rr.q, rr.s, spec.domain, opts);
}

// ---------------------------------------------------------------------------
// verify_reduction
// ---------------------------------------------------------------------------

struct CoefficientCheck {
  std::string name;
  ZeroTestResult result;
};

struct VerificationReport {
  std::vector<CoefficientCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.result.verdict != Verdict::Zero) return false;
    return true;
  }
  bool undecided() const {
    bool any_undecided = false;
    for (const auto& c : checks) {
      if (c.result.verdict == Verdict::Nonzero) return false;
      any_undecided = any_undecided || c.result.verdict == Verdict::Undecided;
    }
    return any_undecided;
  }
};

struct VerifyOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double atol = 1e-10;
};

/// Substitutes y(x), z(x) into the claimed coefficients and checks each
/// against the raw invariant with is_zero over the ansatz domain.
inline VerificationReport verify_reduction(const AnsatzSpec& spec, const ReductionResult& raw,
                                           const ReducedEquation& claimed,
                                           const VerifyOptions& opts = {}) {
  claimed.validate();
  const Substitution sub{{"y", spec.y}, {"z", spec.z}};
  VerificationReport report;
  const auto raws = raw.invariants();
  const auto claims = claimed.coefficients();
  ZeroTestOptions zopts;
  zopts.trials = opts.trials;
  zopts.seed = opts.seed;
  zopts.atol = opts.atol;
  zopts.opaque = spec.opaque;
  for (std::size_t i = 0; i < 5; ++i) {
    Expr diff_expr = *raws[i] - substitute(*claims[i], sub);
    report.checks.push_back({kInvariantNames[i], is_zero(diff_expr, spec.domain, zopts)});
  }
  return report;
}

inline VerificationReport verify_reduction(const AnsatzSpec& spec,
                                           const ReducedEquation& claimed,
                                           const VerifyOptions& opts = {}) {
  return verify_reduction(spec, compute_invariants(spec), claimed, opts);
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
  int index;
  std::string description;
  AnsatzSpec spec;
  ReducedEquation equation;
  CaseKind expected_case;
  int expected_lambda = 0;
};

/// Entry `index` (1..4) built from the frame. Entry 3 uses the opaque
/// function Phi backed by `phi` (a builtin name: square|sin|exp|cubic).
inline CatalogEntry catalog_entry(int index, const Frame& frame = canonical_frame(),
                                  const std::string& phi = "square") {
  const Expr ax = project(frame, FrameSlot::A);
  const Expr bx = project(frame, FrameSlot::B);
  const Expr cx = project(frame, FrameSlot::C);
  const Expr dx = project(frame, FrameSlot::D);
  const Expr y = variable("y");
  const Expr z = variable("z");
  const Rational two(2);
  CatalogEntry e;
  e.index = index;
  switch (index) {
    case 1:
      e.description = "y = ax, z = dx: phi_yy - phi_zz = F(phi)";
      e.spec.y = ax;
      e.spec.z = dx;
      e.equation = {constant(1), constant(0), constant(-1), constant(0), constant(0), {}};
      e.expected_case = CaseKind::Hyperbolic;
      break;
    case 2:
      e.description =
          "y = ax, z = ((bx)^2 + (cx)^2 + (dx)^2)^(1/2): "
          "phi_yy - phi_zz - (2/z) phi_z = F(phi)";
      e.spec.y = ax;
      e.spec.z = sqrt(make_sum({pow(bx, two), pow(cx, two), pow(dx, two)}));
      e.spec.domain.exclude.push_back(e.spec.z);
      e.equation = {constant(1), constant(0), constant(-1), constant(0),
                    make_div(constant(-2), z), {}};
      e.expected_case = CaseKind::Hyperbolic;
      break;
    case 3:
      e.description = "y = bx + Phi(ax + dx), z = cx: -phi_zz - phi_yy = F(phi)";
      e.spec.y = bx + make_opaque("Phi", ax + dx);
      e.spec.z = cx;
      e.spec.set_builtin("Phi", phi);
      e.equation = {constant(-1), constant(0), constant(-1), constant(0), constant(0), {}};
      e.expected_case = CaseKind::Elliptic;
      break;
    case 4:
      e.description =
          "y = ((bx)^2 + (cx)^2)^(1/2), z = ax + dx: -phi_yy - (1/y) phi_y = F(phi)";
      e.spec.y = sqrt(make_sum({pow(bx, two), pow(cx, two)}));
      e.spec.z = ax + dx;
      e.spec.domain.exclude.push_back(e.spec.y);
      e.equation = {constant(-1), constant(0), constant(0), make_div(constant(-1), y),
                    constant(0), {}};
      e.expected_case = CaseKind::Parabolic;
      e.expected_lambda = -1;
      break;
    default:
      throw std::invalid_argument("catalog entries are numbered 1..4, got " +
                                  std::to_string(index));
  }
  return e;
}

inline std::vector<CatalogEntry> catalog(const Frame& frame = canonical_frame(),
                                         const std::string& phi = "square") {
  std::vector<CatalogEntry> out;
  for (int i = 1; i <= 4; ++i) out.push_back(catalog_entry(i, frame, phi));
  return out;
}

}  // namespace wavered
