#pragma once

// Necessary compatibility conditions for the canonical d'Alembert-Hamilton
// systems. Each check is one-sided: a passing report means the necessary
// condition holds, never that the system is compatible.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavered/diff.hpp"
#include "wavered/expr.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

enum class SystemKind { Elliptic, Hyperbolic, Parabolic, FirstOrder };

inline const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::Elliptic: return "elliptic";
    case SystemKind::Hyperbolic: return "hyperbolic";
    case SystemKind::Parabolic: return "parabolic";
    case SystemKind::FirstOrder: return "first_order";
  }
  return "?";
}

/// A canonical system in the pair variables (v, vs) for the elliptic kind
/// (vs standing for the conjugate, treated as an independent slot) or (v, w)
/// otherwise. n is the number of spatial coordinates x1..xn.
struct CanonicalSystem {
  SystemKind kind = SystemKind::Hyperbolic;
  std::optional<Expr> h;  // absent for FirstOrder; unused by Parabolic
  int lambda = 1;         // Parabolic only
  Expr V;
  std::optional<Expr> W;  // absent for Elliptic
  unsigned n = 3;

  std::vector<std::string> pair_variables() const {
    if (kind == SystemKind::Elliptic) return {"v", "vs"};
    return {"v", "w"};
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    const auto vars = pair_variables();
    auto check_vars = [&](const Expr& e, const char* what) {
      for (const auto& v : free_variables(e))
        if (v != vars[0] && v != vars[1])
          throw std::invalid_argument(std::string(what) + " uses '" + v + "'; a " +
                                      system_kind_name(kind) + " system uses " + vars[0] +
                                      ", " + vars[1]);
    };
    check_vars(V, "V");
    if (h) check_vars(*h, "h");
    if (W) check_vars(*W, "W");
    switch (kind) {
      case SystemKind::Elliptic:
        if (!h) throw std::invalid_argument("elliptic system needs h");
        if (W) throw std::invalid_argument("elliptic system has no W (its partner is V*)");
        break;
      case SystemKind::Hyperbolic:
        if (!h || !W) throw std::invalid_argument("hyperbolic system needs h and W");
        break;
      case SystemKind::Parabolic:
        if (!W) throw std::invalid_argument("parabolic system needs W");
        if (lambda != 1 && lambda != -1)
          throw std::invalid_argument("lambda must be +1 or -1");
        break;
      case SystemKind::FirstOrder:
        if (!W) throw std::invalid_argument("first-order system needs W");
        break;
    }
  }
};

/// f -> (h d/dvar)^times f.
inline Expr apply_h_operator(const Expr& h, const std::string& var, const Expr& f,
                             unsigned times) {
  Expr r = f;
  for (unsigned i = 0; i < times; ++i) r = h * diff(r, var);
  return r;
}

/// scale * d(Phi)/d(var) / Phi, with scale = h or lambda.
inline Expr construct_V(const Expr& scale, const Expr& phi, const std::string& var) {
  if (phi.is_exact_zero()) throw std::invalid_argument("seed function is identically zero");
  return make_div(scale * diff(phi, var), phi);
}

struct NilpotencyCertificate {
  Expr h;
  std::string var;
  Expr seed;
  std::vector<Expr> chain;  // seed followed by n + 1 successive images
  ZeroTestResult verdict;

  bool symbolically_zero() const { return chain.back().is_exact_zero(); }
  std::string operator_text() const {
    return "(" + to_string(h) + " d/d" + var + ")^" + std::to_string(chain.size() - 1);
  }
};

struct ConditionCheck {
  std::string condition;
  ZeroTestResult result;
};

enum class CompatStatus { NecessaryConditionSatisfied, Violated, Undecided };

struct CompatReport {
  SystemKind kind;
  std::vector<ConditionCheck> conditions;
  std::vector<NilpotencyCertificate> certificates;
  std::vector<std::string> excluded_sets;

  CompatStatus status() const {
    bool undecided = false;
    for (const auto& c : conditions) {
      if (c.result.verdict == Verdict::Nonzero) return CompatStatus::Violated;
      undecided = undecided || c.result.verdict == Verdict::Undecided;
    }
    return undecided ? CompatStatus::Undecided : CompatStatus::NecessaryConditionSatisfied;
  }

  std::string label() const {
    switch (status()) {
      case CompatStatus::NecessaryConditionSatisfied:
        return "necessary condition satisfied";
      case CompatStatus::Violated: {
        std::string s = "necessary condition violated:";
        for (const auto& c : conditions)
          if (c.result.verdict == Verdict::Nonzero) s += " " + c.condition + ";";
        s.pop_back();
        return s;
      }
      case CompatStatus::Undecided:
        return "undecided";
    }
    return "?";
  }
};

struct CompatOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double atol = 1e-10;
  double lo = -2.0;
  double hi = 2.0;
};

namespace detail {

inline SamplingBox pair_box(const CanonicalSystem& sys, const CompatOptions& opts,
                            const std::vector<Expr>& vanishing, CompatReport& report) {
  SamplingBox box = SamplingBox::cube(sys.pair_variables(), opts.lo, opts.hi);
  for (const auto& g : vanishing) {
    if (g.is_constant()) continue;
    box.exclude.push_back(g);
    report.excluded_sets.push_back(to_string(g) + " = 0");
  }
  return box;
}

inline ZeroTestOptions zero_options(const CompatOptions& opts) {
  ZeroTestOptions z;
  z.trials = opts.trials;
  z.seed = opts.seed;
  z.atol = opts.atol;
  return z;
}

inline void reject_zero_seed(const Expr& seed, const SamplingBox& box,
                             const CompatOptions& opts, const char* name) {
  auto zopts = zero_options(opts);
  SamplingBox plain = box;
  plain.exclude.clear();
  if (seed.is_exact_zero() || is_zero(seed, plain, zopts).zero())
    throw std::invalid_argument(std::string("seed ") + name +
                                " is identically zero; V is undefined");
}

inline NilpotencyCertificate certify(const Expr& h, const std::string& var, const Expr& seed,
                                     unsigned n, const SamplingBox& box,
                                     const CompatOptions& opts) {
  NilpotencyCertificate cert{h, var, seed, {seed}, {}};
  for (unsigned k = 0; k <= n; ++k) cert.chain.push_back(apply_h_operator(h, var, cert.chain.back(), 1));
  cert.verdict = is_zero(cert.chain.back(), box, zero_options(opts));
  return cert;
}

inline void check_form(CompatReport& report, const std::string& condition, const Expr& V,
                       const Expr& scale, const Expr& seed, const std::string& var,
                       const SamplingBox& box, const CompatOptions& opts) {
  // V = scale * d(seed)/d(var) / seed, cleared of the denominator.
  Expr residual = V * seed - scale * diff(seed, var);
  report.conditions.push_back({condition, is_zero(residual, box, zero_options(opts))});
}

inline void check_chain(CompatReport& report, NilpotencyCertificate cert) {
  std::string cond = cert.operator_text() + " " + to_string(cert.seed) + " = 0";
  report.conditions.push_back({cond, cert.verdict});
  report.certificates.push_back(std::move(cert));
}

inline void require_kind(const CanonicalSystem& sys, SystemKind k) {
  sys.validate();
  if (sys.kind != k)
    throw std::invalid_argument(std::string("expected a ") + system_kind_name(k) +
                                " system, got " + system_kind_name(sys.kind));
}

}  // namespace detail

/// Elliptic system: V = h d_vs Phi / Phi and (h d_vs)^(n+1) Phi = 0.
inline CompatReport check_theorem1(const CanonicalSystem& sys, const Expr& phi,
                                   const CompatOptions& opts = {}) {
  detail::require_kind(sys, SystemKind::Elliptic);
  CompatReport report{sys.kind, {}, {}, {}};
  const Expr& h = *sys.h;
  SamplingBox box = detail::pair_box(sys, opts, {phi, h}, report);
  detail::reject_zero_seed(phi, box, opts, "Phi");
  detail::check_form(report, "V = h d_vs Phi / Phi", sys.V, h, phi, "vs", box, opts);
  detail::check_chain(report, detail::certify(h, "vs", phi, sys.n, box, opts));
  return report;
}

/// Hyperbolic system: V = h d_w Phi / Phi, W = h d_v Psi / Psi,
/// (h d_v)^(n+1) Psi = 0 and (h d_w)^(n+1) Phi = 0.
inline CompatReport check_theorem2(const CanonicalSystem& sys, const Expr& phi,
                                   const Expr& psi, const CompatOptions& opts = {}) {
  detail::require_kind(sys, SystemKind::Hyperbolic);
  CompatReport report{sys.kind, {}, {}, {}};
  const Expr& h = *sys.h;
  SamplingBox box = detail::pair_box(sys, opts, {phi, psi, h}, report);
  detail::reject_zero_seed(phi, box, opts, "Phi");
  detail::reject_zero_seed(psi, box, opts, "Psi");
  detail::check_form(report, "V = h d_w Phi / Phi", sys.V, h, phi, "w", box, opts);
  detail::check_form(report, "W = h d_v Psi / Psi", *sys.W, h, psi, "v", box, opts);
  detail::check_chain(report, detail::certify(h, "v", psi, sys.n, box, opts));
  detail::check_chain(report, detail::certify(h, "w", phi, sys.n, box, opts));
  return report;
}

/// Parabolic system: V = lambda d_v Phi / Phi, d_v^(n+1) Phi = 0, W = 0.
inline CompatReport check_theorem3(const CanonicalSystem& sys, const Expr& phi,
                                   const CompatOptions& opts = {}) {
  detail::require_kind(sys, SystemKind::Parabolic);
  CompatReport report{sys.kind, {}, {}, {}};
  SamplingBox box = detail::pair_box(sys, opts, {phi}, report);
  detail::reject_zero_seed(phi, box, opts, "Phi");
  detail::check_form(report, "V = lambda d_v Phi / Phi", sys.V, constant(sys.lambda), phi,
                     "v", box, opts);
  detail::check_chain(report, detail::certify(constant(1), "v", phi, sys.n, box, opts));
  report.conditions.push_back({"W = 0", is_zero(*sys.W, box, detail::zero_options(opts))});
  return report;
}

/// First-order system: V = W = 0.
inline CompatReport check_first_order(const CanonicalSystem& sys,
                                      const CompatOptions& opts = {}) {
  detail::require_kind(sys, SystemKind::FirstOrder);
  CompatReport report{sys.kind, {}, {}, {}};
  SamplingBox box = detail::pair_box(sys, opts, {}, report);
  auto z = detail::zero_options(opts);
  report.conditions.push_back({"V = 0", is_zero(sys.V, box, z)});
  report.conditions.push_back({"W = 0", is_zero(*sys.W, box, z)});
  return report;
}

}  // namespace wavered
