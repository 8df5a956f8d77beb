#pragma once

// JSON and CSV formats for frames, ansatz specs, reduced equations,
// canonical systems, residual reports and grid solutions.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "wavered/ansatz.hpp"
#include "wavered/compat.hpp"
#include "wavered/lift.hpp"
#include "wavered/minkowski.hpp"
#include "wavered/parse.hpp"
#include "wavered/solvers.hpp"

namespace wavered {

using json = nlohmann::json;

/// Malformed document (wrong shape or type); distinct from expression
/// syntax errors, which surface as ParseError.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Expr expr_field(const json& j, const char* key) {
  const json& v = require(j, key);
  if (v.is_number()) return constant_float(v.get<double>());
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be an expression string");
  return parse(v.get<std::string>());
}

inline std::vector<double> number_array(const json& v, const char* what) {
  if (!v.is_array()) throw FormatError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw FormatError(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

// --- Frame ------------------------------------------------------------------

inline json to_json(const Frame& f) {
  auto vec = [](const FourVector& v) { return json::array({v[0], v[1], v[2], v[3]}); };
  return {{"a", vec(f.a)}, {"b", vec(f.b)}, {"c", vec(f.c)}, {"d", vec(f.d)}};
}

inline Frame frame_from_json(const json& j) {
  auto vec = [&](const char* key) {
    auto v = detail::number_array(detail::require(j, key), key);
    if (v.size() != 4) throw FormatError(std::string("frame vector '") + key + "' needs 4 components");
    return FourVector{{v[0], v[1], v[2], v[3]}};
  };
  return {vec("a"), vec("b"), vec("c"), vec("d")};
}

// --- AnsatzSpec -------------------------------------------------------------

inline json to_json(const AnsatzSpec& s) {
  json j{{"y", to_string(s.y)}, {"z", to_string(s.z)}};
  json op = json::object();
  for (const auto& [name, builtin] : s.opaque_builtins) op[name] = builtin;
  j["opaque"] = op;
  json ex = json::array();
  for (const auto& e : s.domain.exclude) ex.push_back(to_string(e));
  j["domain"] = {{"min", s.domain.lo}, {"max", s.domain.hi}, {"exclude", ex}};
  return j;
}

inline AnsatzSpec ansatz_from_json(const json& j) {
  AnsatzSpec s;
  s.y = detail::expr_field(j, "y");
  s.z = detail::expr_field(j, "z");
  if (j.contains("opaque")) {
    const json& op = j.at("opaque");
    if (!op.is_object()) throw FormatError("'opaque' must be an object");
    for (const auto& [name, builtin] : op.items()) {
      if (!builtin.is_string()) throw FormatError("opaque implementation must be a builtin name");
      try {
        s.set_builtin(name, builtin.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
    }
  }
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    if (d.contains("min")) s.domain.lo = detail::number_array(d.at("min"), "domain.min");
    if (d.contains("max")) s.domain.hi = detail::number_array(d.at("max"), "domain.max");
    if (s.domain.lo.size() != 4 || s.domain.hi.size() != 4)
      throw FormatError("domain bounds need 4 entries (x0..x3)");
    for (std::size_t i = 0; i < 4; ++i)
      if (!(s.domain.lo[i] < s.domain.hi[i])) throw FormatError("domain has zero volume");
    if (d.contains("exclude")) {
      for (const auto& e : d.at("exclude")) {
        if (!e.is_string()) throw FormatError("domain.exclude entries must be expressions");
        s.domain.exclude.push_back(parse(e.get<std::string>()));
      }
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return s;
}

// --- ReducedEquation --------------------------------------------------------

inline json to_json(const ReducedEquation& eq) {
  json j;
  const auto cs = eq.coefficients();
  for (std::size_t i = 0; i < 5; ++i) j[kInvariantNames[i]] = to_string(*cs[i]);
  if (eq.F) j["F"] = to_string(*eq.F);
  return j;
}

inline ReducedEquation reduced_from_json(const json& j) {
  ReducedEquation eq;
  eq.r = detail::expr_field(j, "r");
  eq.q = detail::expr_field(j, "q");
  eq.s = detail::expr_field(j, "s");
  eq.R = detail::expr_field(j, "R");
  eq.S = detail::expr_field(j, "S");
  if (j.contains("F")) eq.F = substitute(detail::expr_field(j, "F"), "u", variable("phi"));
  try {
    eq.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return eq;
}

// --- CanonicalSystem --------------------------------------------------------

inline SystemKind system_kind_from_string(const std::string& s) {
  for (SystemKind k : {SystemKind::Elliptic, SystemKind::Hyperbolic, SystemKind::Parabolic,
                       SystemKind::FirstOrder})
    if (s == system_kind_name(k)) return k;
  throw FormatError("unknown system kind '" + s + "'");
}

inline json to_json(const CanonicalSystem& sys) {
  json j{{"kind", system_kind_name(sys.kind)}, {"V", to_string(sys.V)}, {"n", sys.n}};
  if (sys.h) j["h"] = to_string(*sys.h);
  if (sys.W) j["W"] = to_string(*sys.W);
  if (sys.kind == SystemKind::Parabolic) j["lambda"] = sys.lambda;
  return j;
}

inline CanonicalSystem system_from_json(const json& j) {
  CanonicalSystem sys;
  const json& kind = detail::require(j, "kind");
  if (!kind.is_string()) throw FormatError("'kind' must be a string");
  sys.kind = system_kind_from_string(kind.get<std::string>());
  sys.V = detail::expr_field(j, "V");
  if (j.contains("h")) sys.h = detail::expr_field(j, "h");
  if (j.contains("W")) sys.W = detail::expr_field(j, "W");
  if (j.contains("lambda")) {
    if (!j.at("lambda").is_number_integer()) throw FormatError("'lambda' must be 1 or -1");
    sys.lambda = j.at("lambda").get<int>();
  }
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<long>() < 1)
      throw FormatError("'n' must be a positive integer");
    sys.n = j.at("n").get<unsigned>();
  }
  try {
    sys.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return sys;
}

// --- Reports ----------------------------------------------------------------

inline json to_json(const ResidualReport& r) {
  return {{"max", r.max},
          {"mean", r.mean},
          {"worst_point", r.worst_point},
          {"samples_used", r.samples_used},
          {"samples_rejected", r.samples_rejected}};
}

inline json to_json(const ZeroTestResult& z) {
  json j{{"verdict", verdict_name(z.verdict)},
         {"samples_used", z.samples_used},
         {"domain_errors", z.domain_errors}};
  if (z.verdict == Verdict::Nonzero) {
    j["witness"] = z.witness;
    j["witness_value"] = z.witness_value;
  }
  return j;
}

inline json to_json(const ClosedFormSolution& s) {
  return {{"name", s.name}, {"params", s.params}, {"expr", to_string(s.expr)}};
}

// --- GridSolution -----------------------------------------------------------

inline json grid_header(const GridSolution& g) {
  return {{"y_min", g.y_min},
          {"z_min", g.z_min},
          {"hy", g.hy},
          {"hz", g.hz},
          {"ny", g.ny},
          {"nz", g.nz},
          {"periodic_z", g.periodic_z},
          {"scheme", g.meta.scheme},
          {"boundary", g.meta.boundary},
          {"cfl", g.meta.cfl},
          {"iterations", g.meta.iterations},
          {"converged", g.meta.converged},
          {"final_update", g.meta.final_update}};
}

/// Rows "y,z,phi" with a header line, doubles printed round-trip exact.
inline void write_grid_csv(const GridSolution& g, std::ostream& os) {
  os << "y,z,phi\n";
  char buf[96];
  for (std::size_t i = 0; i < g.ny; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.y(i), g.z(j), g.at(i, j));
      os << buf;
    }
}

/// Rebuilds a grid from its JSON header and CSV body.
inline GridSolution read_grid(const json& header, std::istream& csv) {
  GridSolution g;
  auto num = [&](const char* k) {
    const json& v = detail::require(header, k);
    if (!v.is_number()) throw FormatError(std::string("grid header field '") + k + "' must be numeric");
    return v;
  };
  g.y_min = num("y_min").get<double>();
  g.z_min = num("z_min").get<double>();
  g.hy = num("hy").get<double>();
  g.hz = num("hz").get<double>();
  g.ny = num("ny").get<std::size_t>();
  g.nz = num("nz").get<std::size_t>();
  g.periodic_z = header.value("periodic_z", false);
  g.meta.scheme = header.value("scheme", "");
  g.meta.boundary = header.value("boundary", "");
  g.meta.cfl = header.value("cfl", 0.0);
  g.meta.iterations = header.value("iterations", std::size_t{0});
  g.meta.converged = header.value("converged", true);
  g.meta.final_update = header.value("final_update", 0.0);
  std::string line;
  if (!std::getline(csv, line) || line != "y,z,phi") throw FormatError("grid CSV must start with 'y,z,phi'");
  g.values.reserve(g.ny * g.nz);
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[3];
    for (auto& c : cell)
      if (!std::getline(row, c, ',')) throw FormatError("grid CSV row needs 3 columns");
    try {
      g.values.push_back(std::stod(cell[2]));
    } catch (const std::exception&) {
      throw FormatError("grid CSV value '" + cell[2] + "' is not a number");
    }
  }
  if (!g.consistent()) throw FormatError("grid CSV does not match header dimensions");
  return g;
}

}  // namespace wavered
