// wavered: command-line front end for reducing u_tt - lap u = F(u) with u = phi(y, z).
//
// Exit codes: 0 pass, 1 failed check or solver error, 2 bad input, 3 undecided.

#include <charconv>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavered/io.hpp"
#include "wavered/wavered.hpp"

namespace {

using namespace wavered;

enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2, kUndecided = 3 };

struct Globals {
  bool json = false;
  std::uint64_t seed = 1;
  std::size_t trials = 0;  // 0 keeps each check's own default
  std::optional<double> tol;
  unsigned threads = 1;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string point_text(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += fmt(i ? ", %.6g" : "%.6g", p[i]);
  return s + ")";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Parses `text` and checks it only uses the listed variables.
Expr expr_arg(const std::string& text, const std::vector<std::string>& allowed, const char* flag) {
  Expr e = parse(text);
  for (const auto& v : free_variables(e)) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == v;
    if (!ok) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw FormatError(std::string(flag) + " may only use " + (list.empty() ? "constants" : list) +
                        "; found '" + v + "'");
    }
  }
  return e;
}

void emit(const Globals& g, const std::string& text, json j) {
  if (g.json) {
    j["seed"] = g.seed;
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
  } else {
    std::fputs(text.c_str(), stdout);
  }
}

int result_code(bool failed, bool undecided) {
  if (failed) return kFail;
  return undecided ? kUndecided : kPass;
}

const char* result_name(int code) {
  switch (code) {
    case kPass: return "pass";
    case kFail: return "fail";
    case kUndecided: return "undecided";
    default: return "error";
  }
}

// --- ansatz selection -------------------------------------------------------

struct LoadedAnsatz {
  AnsatzSpec spec;
  std::optional<CatalogEntry> entry;
};

LoadedAnsatz load_ansatz(const std::string& selector, const std::string& frame_path,
                         const std::string& phi) {
  Frame frame = canonical_frame();
  if (!frame_path.empty()) {
    frame = frame_from_json(read_json_file(frame_path));
    auto bad = validate_frame(frame, kNumericFrameTol);
    if (!bad.empty())
      throw FormatError("frame violates " + bad[0].condition + " (off by " +
                        fmt("%.3g", bad[0].magnitude) + ")");
  }
  const std::string prefix = "catalog:";
  if (selector.compare(0, prefix.size(), prefix) == 0) {
    int index = 0;
    const char* first = selector.data() + prefix.size();
    const char* last = selector.data() + selector.size();
    auto [end, ec] = std::from_chars(first, last, index);
    if (ec != std::errc() || end != last) throw FormatError("bad catalog selector '" + selector + "'");
    try {
      CatalogEntry e = catalog_entry(index, frame, phi);
      return {e.spec, e};
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (!frame_path.empty()) throw FormatError("--frame only applies to catalog:N selectors");
  return {ansatz_from_json(read_json_file(selector)), std::nullopt};
}

std::string ansatz_text(const AnsatzSpec& s) {
  return "ansatz  y = " + to_string(s.y) + "\n        z = " + to_string(s.z) + "\n";
}

// --- verify-ansatz ----------------------------------------------------------

struct VerifyArgs {
  std::string spec;
  std::string claimed;
  std::string frame;
  std::string phi = "square";
};

int cmd_verify_ansatz(const VerifyArgs& a, const Globals& g) {
  const LoadedAnsatz in = load_ansatz(a.spec, a.frame, a.phi);
  std::optional<ReducedEquation> claimed;
  if (in.entry) claimed = in.entry->equation;
  if (!a.claimed.empty()) claimed = reduced_from_json(read_json_file(a.claimed));

  bool failed = false, undecided = false;
  std::string text = ansatz_text(in.spec);
  json j{{"ansatz", to_json(in.spec)}};
  if (in.entry) j["catalog"] = in.entry->index;

  const ReductionResult rr = compute_invariants(in.spec);
  DependenceOptions dopt;
  dopt.seed = g.seed;
  text += "invariants\n";
  json jinv = json::array();
  const auto raws = rr.invariants();
  for (std::size_t i = 0; i < 5; ++i) {
    const auto d = depends_only_on_yz(*raws[i], in.spec, dopt);
    const char* status = d.verdict == Verdict::Zero      ? "function of (y, z)"
                         : d.verdict == Verdict::Nonzero ? "NOT a function of (y, z)"
                                                         : "undecided";
    text += fmt("  %s = %s\n      %s\n", kInvariantNames[i], to_string(*raws[i]).c_str(), status);
    json ji{{"name", kInvariantNames[i]}, {"expr", to_string(*raws[i])}, {"function_of_yz", verdict_name(d.verdict)}};
    if (d.verdict == Verdict::Nonzero) {
      failed = true;
      text += fmt("      x = %s gives %.9g\n      x = %s gives %.9g\n", point_text(d.point_a).c_str(),
                  d.value_a, point_text(d.point_b).c_str(), d.value_b);
      ji["witness"] = {{"x_a", d.point_a}, {"value_a", d.value_a}, {"x_b", d.point_b}, {"value_b", d.value_b}};
    }
    undecided = undecided || d.verdict == Verdict::Undecided;
    jinv.push_back(ji);
  }
  j["invariants"] = jinv;

  ClassifyOptions copt;
  copt.seed = g.seed;
  const Classification c = classify_case(rr, in.spec, copt);
  text += fmt("case    %s", case_name(c.kind));
  if (c.kind == CaseKind::Parabolic) text += fmt(" (lambda = %+d)", c.lambda);
  text += "\n";
  json jc{{"case", case_name(c.kind)}};
  if (c.kind == CaseKind::Parabolic) jc["lambda"] = c.lambda;
  if (c.kind == CaseKind::Mixed) {
    json cells = json::array();
    std::map<CaseKind, std::size_t> per_kind;
    for (const auto& cell : c.regions) {
      ++per_kind[cell.kind];
      cells.push_back({{"lo", cell.lo}, {"hi", cell.hi}, {"case", case_name(cell.kind)}});
    }
    text += fmt("  %zu cells:", c.regions.size());
    for (const auto& [kind, count] : per_kind) text += fmt(" %zu %s", count, case_name(kind));
    text += " (cell list in --json output)\n";
    jc["regions"] = cells;
  }
  if (in.entry && (c.kind != in.entry->expected_case || c.lambda != in.entry->expected_lambda)) {
    failed = true;
    text += fmt("  expected %s for catalog entry %d\n", case_name(in.entry->expected_case), in.entry->index);
    jc["expected"] = case_name(in.entry->expected_case);
  }
  j["classification"] = jc;

  if (claimed) {
    VerifyOptions vopt;
    vopt.seed = g.seed;
    if (g.trials) vopt.trials = g.trials;
    if (g.tol) vopt.atol = *g.tol;
    const auto report = verify_reduction(in.spec, rr, *claimed, vopt);
    text += fmt("reduction (%zu points, atol %.1e)\n", vopt.trials, vopt.atol);
    json jr = json::array();
    const auto cs = claimed->coefficients();
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
      const auto& chk = report.checks[i];
      text += fmt("  %s = %s  %s", chk.name.c_str(), to_string(*cs[i]).c_str(),
                  chk.result.verdict == Verdict::Zero      ? "matches"
                  : chk.result.verdict == Verdict::Nonzero ? "MISMATCH"
                                                           : "undecided");
      if (chk.result.verdict == Verdict::Nonzero)
        text += fmt(" (off by %.6g at x = %s)", chk.result.witness_value,
                    point_text(chk.result.witness).c_str());
      text += "\n";
      json jx = to_json(chk.result);
      jx["name"] = chk.name;
      jx["claimed"] = to_string(*cs[i]);
      jr.push_back(jx);
    }
    j["reduction"] = jr;
    failed = failed || (!report.passed() && !report.undecided());
    undecided = undecided || report.undecided();
  }

  const int code = result_code(failed, undecided);
  text += fmt("result  %s\n", result_name(code));
  j["result"] = result_name(code);
  emit(g, text, j);
  return code;
}

// --- check-compat -----------------------------------------------------------

struct CompatArgs {
  std::string system;
  std::string phi;
  std::string psi;
  unsigned n = 0;
};

int cmd_check_compat(const CompatArgs& a, const Globals& g) {
  CanonicalSystem sys = system_from_json(read_json_file(a.system));
  if (a.n) sys.n = a.n;
  CompatOptions o;
  o.seed = g.seed;
  if (g.trials) o.trials = g.trials;
  if (g.tol) o.atol = *g.tol;
  auto seed_arg = [&](const std::string& text, const char* flag) {
    if (text.empty())
      throw FormatError(std::string("a ") + system_kind_name(sys.kind) + " system needs " + flag);
    return expr_arg(text, sys.pair_variables(), flag);
  };
  CompatReport report;
  try {
    switch (sys.kind) {
      case SystemKind::Elliptic: report = check_theorem1(sys, seed_arg(a.phi, "--phi"), o); break;
      case SystemKind::Hyperbolic:
        report = check_theorem2(sys, seed_arg(a.phi, "--phi"), seed_arg(a.psi, "--psi"), o);
        break;
      case SystemKind::Parabolic: report = check_theorem3(sys, seed_arg(a.phi, "--phi"), o); break;
      case SystemKind::FirstOrder: report = check_first_order(sys, o); break;
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }

  std::string text = fmt("system  %s, n = %u\n", system_kind_name(sys.kind), sys.n);
  json j{{"system", to_json(sys)}};
  text += "conditions\n";
  json jc = json::array();
  for (const auto& c : report.conditions) {
    text += fmt("  %-28s %s", c.condition.c_str(), verdict_name(c.result.verdict));
    if (c.result.verdict == Verdict::Nonzero)
      text += fmt(" (%.6g at %s)", c.result.witness_value, point_text(c.result.witness).c_str());
    text += "\n";
    json jx = to_json(c.result);
    jx["condition"] = c.condition;
    jc.push_back(jx);
  }
  j["conditions"] = jc;
  json jcert = json::array();
  for (const auto& cert : report.certificates) {
    text += fmt("certificate  %s applied to %s\n", cert.operator_text().c_str(),
                to_string(cert.seed).c_str());
    json steps = json::array();
    for (std::size_t k = 0; k < cert.chain.size(); ++k) {
      text += fmt("  step %zu: %s\n", k, to_string(cert.chain[k]).c_str());
      steps.push_back(to_string(cert.chain[k]));
    }
    text += fmt("  final image: %s%s\n", verdict_name(cert.verdict.verdict),
                cert.symbolically_zero() ? " (exactly 0)" : "");
    jcert.push_back({{"operator", cert.operator_text()},
                     {"seed", to_string(cert.seed)},
                     {"chain", steps},
                     {"final", to_json(cert.verdict)},
                     {"symbolically_zero", cert.symbolically_zero()}});
  }
  j["certificates"] = jcert;
  if (!report.excluded_sets.empty()) {
    text += "excluded\n";
    for (const auto& e : report.excluded_sets) text += "  " + e + "\n";
  }
  j["excluded"] = report.excluded_sets;
  text += "result  " + report.label() + "\n";
  j["result"] = report.label();
  emit(g, text, j);
  switch (report.status()) {
    case CompatStatus::NecessaryConditionSatisfied: return kPass;
    case CompatStatus::Violated: return kFail;
    case CompatStatus::Undecided: return kUndecided;
  }
  return kFail;
}

// --- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string kind;
  std::string F = "0";
  std::string init;
  std::string exact;
  std::string dirichlet;
  std::string phi0, dphi0;
  std::string boundary;
  std::optional<double> z_min, z_max, y_min, y_max, T, hy, hz, y0, y1, step;
  double c = 0.0;
  bool psi = false;
  std::string out;
};

Profile profile(const Expr& e) {
  return [e](double z) { return evaluate(e, Binding{{"z", z}}); };
}

Field2 field(const Expr& e) {
  return [e](double y, double z) { return evaluate(e, Binding{{"y", y}, {"z", z}}); };
}

double grid_error(const GridSolution& grid, const Expr& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.ny; ++i)
    for (std::size_t k = 0; k < grid.nz; ++k)
      worst = std::max(worst, std::fabs(grid.at(i, k) -
                                        evaluate(exact, Binding{{"y", grid.y(i)}, {"z", grid.z(k)}})));
  return worst;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << body)) throw std::runtime_error("cannot write '" + path + "'");
}

int cmd_solve(const SolveArgs& a, const Globals& g) {
  const Expr F = expr_arg(a.F, {"u", "phi", "y", "z"}, "--F");
  std::optional<Expr> exact;
  if (a.init == "kink") {
    exact = kink_solution(a.c).expr;
  } else if (!a.init.empty()) {
    throw FormatError("unknown --init '" + a.init + "' (known: kink)");
  }
  if (!a.exact.empty()) exact = expr_arg(a.exact, {"y", "z"}, "--exact");
  std::optional<Expr> boundary = exact;
  if (!a.dirichlet.empty()) boundary = expr_arg(a.dirichlet, {"y", "z"}, "--dirichlet");

  // Initial data: explicit flags win over the exact solution.
  auto initial = [&](const std::string& text, bool derivative, const char* flag) -> Expr {
    if (!text.empty()) return expr_arg(text, {"z"}, flag);
    if (!exact) throw FormatError(std::string("need ") + flag + ", --exact or --init");
    Expr e = derivative ? diff(*exact, "y") : *exact;
    return substitute(e, "y", constant(0));
  };

  std::ostringstream csv;
  json header;
  std::string text;
  if (a.kind == "radial-ode") {
    RadialOdeProblem p;
    p.F = F;
    p.y0 = a.y0.value_or(1.0);
    p.y1 = a.y1.value_or(10.0);
    p.step = a.step.value_or(1e-3);
    p.phi0 = evaluate(expr_arg(a.phi0.empty() ? "0" : a.phi0, {}, "--phi0"), Binding{});
    p.dphi0 = evaluate(expr_arg(a.dphi0.empty() ? "0" : a.dphi0, {}, "--dphi0"), Binding{});
    const auto sol = solve_radial_ode(p);
    csv << "y,phi,dphi\n";
    for (std::size_t i = 0; i < sol.y.size(); ++i)
      csv << fmt("%.17g,%.17g,%.17g\n", sol.y[i], sol.phi[i], sol.dphi[i]);
    header = {{"scheme", "rk4-radial"}, {"y0", p.y0}, {"y1", p.y1}, {"points", sol.y.size()},
              {"series_error", sol.series_error}};
    text = fmt("radial-ode  %zu points on [%g, %g], phi(%g) = %.12g\n", sol.y.size(), p.y0, p.y1,
               sol.y.back(), sol.phi.back());
    if (!a.exact.empty()) {
      const Expr ex = expr_arg(a.exact, {"y"}, "--exact");
      double worst = 0.0;
      for (std::size_t i = 0; i < sol.y.size(); ++i)
        worst = std::max(worst, std::fabs(sol.phi[i] - evaluate(ex, Binding{{"y", sol.y[i]}})));
      header["max_error"] = worst;
      text += fmt("max error against %s: %.3e\n", a.exact.c_str(), worst);
    }
  } else {
    GridSolution grid;
    if (a.kind == "wave1p1") {
      Wave1p1Problem p;
      p.F = F;
      p.phi0 = profile(initial(a.phi0, false, "--phi0"));
      p.dphi0 = profile(initial(a.dphi0, true, "--dphi0"));
      p.z_min = a.z_min.value_or(-10.0);
      p.z_max = a.z_max.value_or(10.0);
      p.T = a.T.value_or(1.0);
      p.hz = a.hz.value_or(0.05);
      p.hy = a.hy.value_or(0.5 * p.hz);
      const std::string bc = a.boundary.empty() ? (boundary ? "dirichlet" : "periodic") : a.boundary;
      if (bc == "dirichlet") {
        p.boundary = BoundaryKind::Dirichlet;
        p.dirichlet = boundary ? field(*boundary) : [phi0 = p.phi0](double, double z) { return phi0(z); };
      } else if (bc != "periodic") {
        throw FormatError("--boundary must be periodic or dirichlet");
      }
      grid = solve_wave_1p1(p);
    } else if (a.kind == "radial-wave") {
      RadialWaveProblem p;
      p.F = F;
      p.phi0 = profile(initial(a.phi0, false, "--phi0"));
      p.dphi0 = profile(initial(a.dphi0, true, "--dphi0"));
      p.z_min = a.z_min.value_or(0.5);
      p.z_max = a.z_max.value_or(2.0);
      p.T = a.T.value_or(1.0);
      p.hz = a.hz.value_or(0.01);
      p.hy = a.hy.value_or(0.5 * p.hz);
      p.psi_substitution = a.psi;
      p.dirichlet = boundary ? field(*boundary) : [phi0 = p.phi0](double, double z) { return phi0(z); };
      grid = solve_radial_wave(p);
    } else if (a.kind == "elliptic") {
      EllipticProblem p;
      p.F = F;
      if (!boundary) throw FormatError("elliptic solve needs --dirichlet or --exact");
      p.boundary = field(*boundary);
      p.y_min = a.y_min.value_or(0.0);
      p.y_max = a.y_max.value_or(1.0);
      p.z_min = a.z_min.value_or(0.0);
      p.z_max = a.z_max.value_or(1.0);
      p.hy = a.hy.value_or(0.02);
      p.hz = a.hz.value_or(p.hy);
      if (g.tol) p.tol = *g.tol;
      grid = solve_elliptic(p);
    } else {
      throw FormatError("unknown equation '" + a.kind + "'");
    }
    write_grid_csv(grid, csv);
    header = grid_header(grid);
    text = fmt("%s  %zu x %zu grid, y in [%g, %g], z in [%g, %g]\n", grid.meta.scheme.c_str(), grid.ny,
               grid.nz, grid.y_min, grid.y_max(), grid.z_min, grid.z_max());
    if (grid.meta.scheme == "newton-gauss-seidel" || !grid.meta.converged)
      text += fmt("iterations %zu, final update %.3e, %s\n", grid.meta.iterations, grid.meta.final_update,
                  grid.meta.converged ? "converged" : "NOT converged");
    else
      text += fmt("cfl %.4g, %zu steps\n", grid.meta.cfl, grid.meta.iterations);
    if (exact) {
      const double err = grid_error(grid, *exact);
      header["max_error"] = err;
      text += fmt("max error against exact solution: %.3e\n", err);
    }
    if (!grid.meta.converged) {
      if (!a.out.empty()) write_file(a.out, csv.str());
      emit(g, text, header);
      return kFail;
    }
  }

  if (a.out.empty()) {
    std::fputs(csv.str().c_str(), stdout);
    std::fputs(g.json ? (header.dump(2) + "\n").c_str() : text.c_str(), stderr);
  } else {
    write_file(a.out, csv.str());
    write_file(a.out + ".json", header.dump(2) + "\n");
    emit(g, text + "wrote " + a.out + " and " + a.out + ".json\n", header);
  }
  return kPass;
}

// --- lift -------------------------------------------------------------------

struct LiftArgs {
  std::string ansatz;
  std::string frame;
  std::string phi = "square";
  std::string F;
  std::string closed_form;
  std::string solution;
  std::string grid;
  std::string grid_csv;
  double c = 0.0;
  int sign = 1;
  double shift = 0.0;
  std::string f = "exp(t)", gseed = "exp(t)";
  std::vector<double> validity;
  std::size_t samples = 500;
};

SamplingBox validity_box(const std::vector<double>& v, double default_half_width) {
  if (v.empty()) return SamplingBox::cube({"y", "z"}, -default_half_width, default_half_width);
  if (!(v[0] < v[1] && v[2] < v[3])) throw FormatError("--validity needs ylo < yhi and zlo < zhi");
  SamplingBox b;
  b.vars = {"y", "z"};
  b.lo = {v[0], v[2]};
  b.hi = {v[1], v[3]};
  return b;
}

std::string report_text(const ResidualReport& r, double tol) {
  return fmt("residual  max %.3e, mean %.3e\n          worst at x = %s\n", r.max, r.mean,
             point_text(r.worst_point).c_str()) +
         fmt("samples   %zu used, %zu rejected\n", r.samples_used, r.samples_rejected) +
         fmt("tolerance %.1e\n", tol);
}

int cmd_lift(const LiftArgs& a, const Globals& g) {
  const LoadedAnsatz in = load_ansatz(a.ansatz, a.frame, a.phi);
  const Expr F = expr_arg(a.F, {"u", "phi"}, "--F");
  const int sources = !a.closed_form.empty() + !a.solution.empty() + !a.grid.empty();
  if (sources != 1) throw FormatError("give exactly one of --closed-form, --solution, --grid");

  std::string text = ansatz_text(in.spec);
  json j{{"ansatz", to_json(in.spec)}, {"F", to_string(F)}};
  ResidualReport r;
  double tol = 0.0;
  if (!a.grid.empty()) {
    std::string csv_path = a.grid_csv;
    if (csv_path.empty()) {
      const std::string ext = ".json";
      if (a.grid.size() <= ext.size() || a.grid.compare(a.grid.size() - ext.size(), ext.size(), ext) != 0)
        throw FormatError("--grid-csv is required when the header is not named <csv>.json");
      csv_path = a.grid.substr(0, a.grid.size() - ext.size());
    }
    std::ifstream csv(csv_path);
    if (!csv) throw FormatError("cannot read '" + csv_path + "'");
    const GridSolution grid = read_grid(read_json_file(a.grid), csv);
    GridLiftOptions o;
    o.seed = g.seed;
    o.samples = a.samples;
    if (g.tol) o.tol = *g.tol;
    const auto gr = lift_grid(in.spec, grid, F, o);
    r = gr.residual;
    tol = gr.tol;
    text += fmt("solution  grid %s (%zu x %zu)\n", grid.meta.scheme.c_str(), grid.ny, grid.nz);
    j["solution"] = grid_header(grid);
  } else {
    ClosedFormSolution sol;
    if (a.closed_form == "kink") {
      try {
        sol = kink_solution(a.c, a.sign, a.shift);
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
      if (!a.validity.empty()) sol.validity = validity_box(a.validity, 0);
    } else if (a.closed_form == "liouville") {
      sol = liouville_solution(expr_arg(a.f, {"t"}, "--f"), expr_arg(a.gseed, {"t"}, "--g"),
                               validity_box(a.validity, 20.0));
      sol.params = {};
    } else if (!a.closed_form.empty()) {
      throw FormatError("unknown --closed-form '" + a.closed_form + "' (known: kink, liouville)");
    } else {
      sol.name = "expression";
      sol.expr = expr_arg(a.solution, {"y", "z"}, "--solution");
      sol.validity = validity_box(a.validity, 20.0);
    }
    LiftOptions o;
    o.seed = g.seed;
    o.samples = a.samples;
    r = lift_closed_form(in.spec, sol, F, o);
    tol = g.tol.value_or(1e-8);
    text += fmt("solution  %s: phi = %s\n", sol.name.c_str(), to_string(sol.expr).c_str());
    j["solution"] = to_json(sol);
  }
  const int code = result_code(!r.undecided && !r.passed(tol), r.undecided);
  text += report_text(r, tol);
  if (r.undecided) text += "too many samples fell outside the solution's validity box\n";
  text += fmt("result    %s\n", result_name(code));
  j["residual"] = to_json(r);
  j["tol"] = tol;
  j["result"] = result_name(code);
  emit(g, text, j);
  return code;
}

// --- demos ------------------------------------------------------------------

int demo_kink(const Globals& g) {
  std::string text = "sine-Gordon kinks lifted through y = ax, z = dx\n";
  json rows = json::array();
  bool ok = true;
  const auto entry = catalog_entry(1);
  LiftOptions o;
  o.seed = g.seed;
  for (double c : {0.0, 0.5, 0.9}) {
    const auto r = lift_closed_form(entry.spec, kink_solution(c), parse("sin(u)"), o);
    const bool pass = r.passed(1e-8);
    ok = ok && pass;
    text += fmt("  c = %.1f  max |box u - sin u| = %.3e over %zu points  %s\n", c, r.max, r.samples_used,
                pass ? "pass" : "FAIL");
    rows.push_back({{"c", c}, {"residual", to_json(r)}, {"pass", pass}});
  }

  // The same kink from a finite-difference solve, lifted off the grid.
  const auto kink = kink_solution(0.0);
  Wave1p1Problem p;
  p.F = parse("sin(phi)");
  p.phi0 = profile(substitute(kink.expr, "y", constant(0)));
  p.dphi0 = profile(substitute(diff(kink.expr, "y"), "y", constant(0)));
  p.z_min = -10;
  p.z_max = 10;
  p.hz = 0.05;
  p.hy = 0.025;
  p.T = 1.0;
  p.boundary = BoundaryKind::Dirichlet;
  p.dirichlet = field(kink.expr);
  const auto grid = solve_wave_1p1(p);
  AnsatzSpec spec = entry.spec;
  spec.domain.lo[0] = 0.0;
  spec.domain.hi[0] = 1.0;
  GridLiftOptions go;
  go.seed = g.seed;
  const auto gr = lift_grid(spec, grid, parse("sin(u)"), go);
  const double err = grid_error(grid, kink.expr);
  ok = ok && gr.passed();
  text += fmt("  leapfrog grid %zu x %zu: max error %.3e, lifted residual %.3e  %s\n", grid.ny, grid.nz, err,
              gr.residual.max, gr.passed() ? "pass" : "FAIL");
  json j{{"demo", "kink"}, {"closed_form", rows},
         {"grid", {{"max_error", err}, {"residual", to_json(gr.residual)}, {"pass", gr.passed()}}},
         {"result", ok ? "pass" : "fail"}};
  text += fmt("result  %s\n", ok ? "pass" : "fail");
  emit(g, text, j);
  return ok ? kPass : kFail;
}

int demo_liouville(const Globals& g) {
  std::string text = "Liouville solutions lifted through y = ax, z = dx\n";
  const auto entry = catalog_entry(1);
  LiftOptions o;
  o.seed = g.seed;
  struct Case {
    const char* f;
    const char* g;
    double x0_lo;
  };
  json rows = json::array();
  bool ok = true;
  // f = g = t needs y = x0 > 0 for the logarithm to be real.
  for (const Case& c : {Case{"exp(t)", "exp(t)", -2.0}, Case{"t", "t", 0.2}}) {
    AnsatzSpec spec = entry.spec;
    spec.domain.lo[0] = c.x0_lo;
    SamplingBox validity = SamplingBox::cube({"y", "z"}, -3, 3);
    validity.lo[0] = c.x0_lo;
    const auto sol = liouville_solution(parse(c.f), parse(c.g), validity);
    const auto r = lift_closed_form(spec, sol, parse("exp(u)"), o);
    const bool pass = !r.undecided && r.passed(1e-8);
    ok = ok && pass;
    text += fmt("  f = %s, g = %s  max |box u - exp u| = %.3e over %zu points  %s\n", c.f, c.g, r.max,
                r.samples_used, pass ? "pass" : "FAIL");
    rows.push_back({{"f", c.f}, {"g", c.g}, {"phi", to_string(sol.expr)}, {"residual", to_json(r)}, {"pass", pass}});
  }
  text += fmt("result  %s\n", ok ? "pass" : "fail");
  emit(g, text, {{"demo", "liouville"}, {"cases", rows}, {"result", ok ? "pass" : "fail"}});
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduction of the nonlinear wave equation by the ansatz u = phi(y, z)", "wavered"};
  app.fallthrough();
  Globals g;
  std::string demo;
  app.add_flag("--json", g.json, "Write machine-readable JSON instead of text");
  app.add_option("--seed", g.seed, "Seed for all sampling")->envname("WAVERED_SEED");
  app.add_option("--trials", g.trials, "Sample points per zero test")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Zero-test atol, residual tolerance or elliptic stopping tolerance");
  app.add_option("--threads", g.threads, "Worker threads for sampling loops")->check(CLI::PositiveNumber);
  app.add_option("--demo", demo, "Run a showcase end to end")->check(CLI::IsMember({"kink", "liouville"}));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-ansatz", "Check that an ansatz reduces the wave equation");
  verify->add_option("spec", va.spec, "catalog:N (N = 1..4) or an ansatz JSON file")->required();
  verify->add_option("claimed", va.claimed, "Claimed reduced equation (JSON)");
  verify->add_option("--frame", va.frame, "Frame JSON for catalog selectors");
  verify->add_option("--phi", va.phi, "Builtin backing Phi in catalog entry 3")
      ->check(CLI::IsMember({"square", "sin", "exp", "cubic"}));

  CompatArgs ca;
  auto* compat = app.add_subcommand("check-compat", "Test the necessary compatibility conditions");
  compat->add_option("system", ca.system, "Canonical system JSON")->required();
  compat->add_option("--phi", ca.phi, "Seed Phi");
  compat->add_option("--psi", ca.psi, "Seed Psi (hyperbolic systems)");
  compat->add_option("--n", ca.n, "Nilpotency order")->check(CLI::PositiveNumber);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a reduced equation numerically");
  solve->add_option("equation", sa.kind, "wave1p1 | radial-wave | elliptic | radial-ode")
      ->required()
      ->check(CLI::IsMember({"wave1p1", "radial-wave", "elliptic", "radial-ode"}));
  solve->add_option("--F", sa.F, "Right-hand side in u (or phi); may use y, z");
  solve->add_option("--init", sa.init, "Named initial data: kink");
  solve->add_option("--c", sa.c, "Kink speed for --init kink");
  solve->add_option("--exact", sa.exact, "Exact phi(y, z) supplying data and an error report");
  solve->add_option("--dirichlet", sa.dirichlet, "Boundary values g(y, z)");
  solve->add_option("--phi0", sa.phi0, "Initial phi (in z; a number for radial-ode)");
  solve->add_option("--dphi0", sa.dphi0, "Initial phi_y (in z; a number for radial-ode)");
  solve->add_option("--boundary", sa.boundary, "periodic | dirichlet (wave1p1)");
  solve->add_option("--z-min", sa.z_min);
  solve->add_option("--z-max", sa.z_max);
  solve->add_option("--y-min", sa.y_min);
  solve->add_option("--y-max", sa.y_max);
  solve->add_option("--T", sa.T, "Final y for the evolution solvers");
  solve->add_option("--hy", sa.hy);
  solve->add_option("--hz", sa.hz);
  solve->add_option("--y0", sa.y0, "Radial ODE start");
  solve->add_option("--y1", sa.y1, "Radial ODE end");
  solve->add_option("--step", sa.step, "Radial ODE step");
  solve->add_flag("--psi", sa.psi, "Evolve z*phi in the radial wave solver");
  solve->add_option("--out", sa.out, "CSV path; the header goes to <out>.json");

  LiftArgs la;
  auto* lift = app.add_subcommand("lift", "Lift a reduced solution and measure box u - F(u)");
  lift->add_option("--ansatz", la.ansatz, "catalog:N or an ansatz JSON file")->required();
  lift->add_option("--frame", la.frame, "Frame JSON for catalog selectors");
  lift->add_option("--phi", la.phi, "Builtin backing Phi in catalog entry 3")
      ->check(CLI::IsMember({"square", "sin", "exp", "cubic"}));
  lift->add_option("--F", la.F, "Right-hand side in u")->required();
  lift->add_option("--closed-form", la.closed_form, "kink | liouville");
  lift->add_option("--solution", la.solution, "Any phi(y, z) expression");
  lift->add_option("--grid", la.grid, "Grid header JSON written by solve");
  lift->add_option("--grid-csv", la.grid_csv, "Grid CSV (default: header path without .json)");
  lift->add_option("--c", la.c, "Kink speed");
  lift->add_option("--sign", la.sign, "Kink orientation")->check(CLI::IsMember({-1, 1}));
  lift->add_option("--shift", la.shift, "Kink offset");
  lift->add_option("--f", la.f, "Liouville seed f(t)");
  lift->add_option("--g", la.gseed, "Liouville seed g(t)");
  lift->add_option("--validity", la.validity, "ylo yhi zlo zhi")->expected(4);
  lift->add_option("--samples", la.samples, "Sample points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }
  set_thread_limit(g.threads);

  try {
    if (!demo.empty()) return demo == "kink" ? demo_kink(g) : demo_liouville(g);
    if (verify->parsed()) return cmd_verify_ansatz(va, g);
    if (compat->parsed()) return cmd_check_compat(ca, g);
    if (solve->parsed()) return cmd_solve(sa, g);
    if (lift->parsed()) return cmd_lift(la, g);
    std::fputs(app.help().c_str(), stderr);
    return kInputError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "wavered: parse error: %s\n", e.what());
    return kInputError;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "wavered: %s\n", e.what());
    return kInputError;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "wavered: solver error: %s\n", e.what());
    if (e.last_stable_layer() >= 0) std::fprintf(stderr, "  last stable layer: %ld\n", e.last_stable_layer());
    return kFail;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "wavered: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wavered: %s\n", e.what());
    return kFail;
  }
}
