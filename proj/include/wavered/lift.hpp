#pragma once

// Lifting reduced solutions back to the four-dimensional wave equation:
// u(x) = phi(y(x), z(x)) is checked against box u = F(u) by residual
// measurement, either through exact jets (closed forms) or through grid
// interpolation (numerical solutions).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wavered/ansatz.hpp"
#include "wavered/eval.hpp"
#include "wavered/sampling.hpp"
#include "wavered/solvers.hpp"

namespace wavered {

struct ResidualReport {
  double max = 0.0;
  double mean = 0.0;
  std::vector<double> worst_point;
  std::size_t samples_used = 0;
  std::size_t samples_rejected = 0;
  bool undecided = false;

  bool passed(double tol) const { return !undecided && samples_used > 0 && max <= tol; }
};

struct LiftOptions {
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  /// Fraction of rejected samples above which the report is undecided.
  double max_rejected_fraction = 0.1;
  /// Overrides the sampling box of reduced_residual (defaults to the
  /// solution's validity box).
  std::optional<SamplingBox> box;
};

/// F as an expression in phi; u is accepted as a synonym.
inline Expr rhs_in_phi(const Expr& F) {
  Expr f = substitute(F, "u", variable("phi"));
  for (const auto& v : free_variables(f))
    if (v != "phi") throw std::invalid_argument("F may only depend on u (or phi), found '" + v + "'");
  return f;
}

/// phi(y(x), z(x)) as an expression over x0..x3.
inline Expr compose(const AnsatzSpec& spec, const Expr& phi_yz) {
  return substitute(phi_yz, Substitution{{"y", spec.y}, {"z", spec.z}});
}

/// box u - F(u) at the coordinate point x, u given over x0..x3.
inline double lifted_residual_at(const AnsatzSpec& spec, const Expr& u, const Expr& F_phi,
                                 const std::vector<double>& x) {
  Binding b;
  for (std::size_t mu = 0; mu < 4; ++mu) b.set(coordinate_names()[mu], x[mu]);
  Jet2 j = eval_jet(u, b, coordinate_names(), spec.opaque);
  double box_u = 0.0;
  for (std::size_t mu = 0; mu < 4; ++mu) box_u += kMetric[mu] * j.hess(mu, mu);
  return box_u - evaluate(F_phi, Binding{{"phi", j.value()}});
}

/// r phi_yy + 2q phi_yz + s phi_zz + R phi_y + S phi_z - F(phi) at (y, z).
inline double reduced_residual_at(const ReducedEquation& eq, const Expr& phi_yz,
                                  const Expr& F_phi, double y, double z) {
  static const std::vector<std::string> kYZ{"y", "z"};
  Binding b{{"y", y}, {"z", z}};
  Jet2 j = eval_jet(phi_yz, b, kYZ);
  const double r = evaluate(eq.r, b), q = evaluate(eq.q, b), s = evaluate(eq.s, b);
  const double R = evaluate(eq.R, b), S = evaluate(eq.S, b);
  const double lhs = r * j.hess(0, 0) + 2.0 * q * j.hess(0, 1) + s * j.hess(1, 1) +
                     R * j.grad(0) + S * j.grad(1);
  return lhs - evaluate(F_phi, Binding{{"phi", j.value()}});
}

namespace detail {

struct PointResidual {
  bool ok = false;
  double value = 0.0;
};

inline ResidualReport summarize(const std::vector<std::vector<double>>& points,
                                const std::vector<PointResidual>& res, std::size_t rejected,
                                const LiftOptions& opts) {
  ResidualReport r;
  r.samples_rejected = rejected;
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!res[i].ok) {
      ++r.samples_rejected;
      continue;
    }
    ++r.samples_used;
    const double a = std::fabs(res[i].value);
    sum += a;
    if (a > r.max || r.worst_point.empty()) {
      r.max = a;
      r.worst_point = points[i];
    }
  }
  if (r.samples_used > 0) r.mean = sum / static_cast<double>(r.samples_used);
  const double total = static_cast<double>(r.samples_used + r.samples_rejected);
  r.undecided = r.samples_used == 0 ||
                static_cast<double>(r.samples_rejected) > opts.max_rejected_fraction * total;
  return r;
}

}  // namespace detail

/// Samples the ansatz domain and measures |box u - F(u)| for the composed
/// closed-form solution with exact second-order jets.
inline ResidualReport lift_closed_form(const AnsatzSpec& spec, const ClosedFormSolution& sol,
                                       const Expr& F, const LiftOptions& opts = {}) {
  spec.validate();
  const Expr F_phi = rhs_in_phi(F);
  const Expr u = compose(spec, sol.expr);
  SampleRng rng(opts.seed);
  std::vector<std::vector<double>> points;
  std::size_t rejected = 0;
  for (std::size_t k = 0; k < opts.samples; ++k) {
    auto p = spec.domain.draw_valid(rng, spec.opaque);
    if (!p) {
      ++rejected;
      continue;
    }
    points.push_back(std::move(*p));
  }
  std::vector<detail::PointResidual> res(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      Binding b = spec.domain.bind(points[i]);
      const std::vector<double> yz{evaluate(spec.y, b, spec.opaque),
                                   evaluate(spec.z, b, spec.opaque)};
      if (!sol.validity.contains(yz) || sol.validity.is_excluded(sol.validity.bind(yz), {}))
        return;
      res[i].value = lifted_residual_at(spec, u, F_phi, points[i]);
      res[i].ok = true;
    } catch (const DomainError&) {
    }
  });
  return detail::summarize(points, res, rejected, opts);
}

/// Residual of the reduced equation itself over the (y, z) validity box.
inline ResidualReport reduced_residual(const ReducedEquation& eq, const ClosedFormSolution& sol,
                                       const Expr& F, const LiftOptions& opts = {}) {
  eq.validate();
  const Expr F_phi = rhs_in_phi(F);
  const SamplingBox& box = opts.box ? *opts.box : sol.validity;
  SampleRng rng(opts.seed);
  std::vector<std::vector<double>> points;
  std::size_t rejected = 0;
  for (std::size_t k = 0; k < opts.samples; ++k) {
    auto p = box.draw_valid(rng, {});
    if (!p) {
      ++rejected;
      continue;
    }
    points.push_back(std::move(*p));
  }
  std::vector<detail::PointResidual> res(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      Binding b = box.bind(points[i]);
      res[i].value = reduced_residual_at(eq, sol.expr, F_phi, b.at("y"), b.at("z"));
      res[i].ok = true;
    } catch (const DomainError&) {
    }
  });
  return detail::summarize(points, res, rejected, opts);
}

// ---------------------------------------------------------------------------
// Grid interpolation
// ---------------------------------------------------------------------------

/// phi and its first and second derivatives on a grid: second-order finite
/// differences at the nodes, then piecewise-cubic Lagrange interpolation in
/// each direction.
class GridInterpolant {
 public:
  enum Field { kPhi = 0, kY, kZ, kYY, kYZ, kZZ, kFieldCount };

  explicit GridInterpolant(const GridSolution& g) : g_(g) {
    if (g.ny < 4 || g.nz < 4) throw std::invalid_argument("grid too small to interpolate");
    const std::size_t n = g.ny * g.nz;
    for (auto& f : fields_) f.assign(n, 0.0);
    for (std::size_t i = 0; i < g.ny; ++i)
      for (std::size_t j = 0; j < g.nz; ++j) fields_[kPhi][i * g.nz + j] = g.at(i, j);
    // d/dy and d2/dy2 along rows, d/dz and d2/dz2 along columns.
    for (std::size_t j = 0; j < g.nz; ++j)
      for (std::size_t i = 0; i < g.ny; ++i) {
        auto val = [&](long k) { return g.at(static_cast<std::size_t>(k), j); };
        fields_[kY][i * g.nz + j] = d1(val, static_cast<long>(i), static_cast<long>(g.ny), g.hy, false);
        fields_[kYY][i * g.nz + j] = d2(val, static_cast<long>(i), static_cast<long>(g.ny), g.hy, false);
      }
    for (std::size_t i = 0; i < g.ny; ++i)
      for (std::size_t j = 0; j < g.nz; ++j) {
        auto val = [&](long k) { return g.at(i, static_cast<std::size_t>(k)); };
        fields_[kZ][i * g.nz + j] = d1(val, static_cast<long>(j), static_cast<long>(g.nz), g.hz, g.periodic_z);
        fields_[kZZ][i * g.nz + j] = d2(val, static_cast<long>(j), static_cast<long>(g.nz), g.hz, g.periodic_z);
      }
    for (std::size_t j = 0; j < g.nz; ++j)
      for (std::size_t i = 0; i < g.ny; ++i) {
        auto val = [&](long k) { return fields_[kZ][static_cast<std::size_t>(k) * g.nz + j]; };
        fields_[kYZ][i * g.nz + j] = d1(val, static_cast<long>(i), static_cast<long>(g.ny), g.hy, false);
      }
  }

  /// True when (y, z) lies inside the grid with a one-cell margin.
  bool covers(double y, double z) const {
    if (y < g_.y_min + g_.hy || y > g_.y_max() - g_.hy) return false;
    if (g_.periodic_z) return true;
    return z >= g_.z_min + g_.hz && z <= g_.z_max() - g_.hz;
  }

  std::array<double, kFieldCount> sample(double y, double z) const {
    const double ty = (y - g_.y_min) / g_.hy;
    double tz = (z - g_.z_min) / g_.hz;
    if (g_.periodic_z) {
      const double n = static_cast<double>(g_.nz);
      tz = std::fmod(tz, n);
      if (tz < 0) tz += n;
    }
    long iy = std::clamp(static_cast<long>(std::floor(ty)) - 1, 0L, static_cast<long>(g_.ny) - 4);
    long iz = static_cast<long>(std::floor(tz)) - 1;
    if (!g_.periodic_z) iz = std::clamp(iz, 0L, static_cast<long>(g_.nz) - 4);
    double wy[4], wz[4];
    lagrange_weights(ty - static_cast<double>(iy), wy);
    lagrange_weights(tz - static_cast<double>(iz), wz);
    std::array<double, kFieldCount> out{};
    for (int a = 0; a < 4; ++a) {
      const std::size_t row = static_cast<std::size_t>(iy + a);
      for (int b = 0; b < 4; ++b) {
        long col = iz + b;
        if (g_.periodic_z) col = ((col % static_cast<long>(g_.nz)) + static_cast<long>(g_.nz)) % static_cast<long>(g_.nz);
        const std::size_t k = row * g_.nz + static_cast<std::size_t>(col);
        const double w = wy[a] * wz[b];
        for (int f = 0; f < kFieldCount; ++f) out[f] += w * fields_[f][k];
      }
    }
    return out;
  }

 private:
  // Cubic Lagrange weights on nodes 0, 1, 2, 3 at local coordinate t.
  static void lagrange_weights(double t, double w[4]) {
    w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
    w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
    w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
  }

  template <class F>
  static double d1(F&& f, long i, long n, double h, bool periodic) {
    if (periodic) return (f((i + 1) % n) - f((i - 1 + n) % n)) / (2.0 * h);
    if (i == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return (f(i + 1) - f(i - 1)) / (2.0 * h);
  }

  template <class F>
  static double d2(F&& f, long i, long n, double h, bool periodic) {
    const double h2 = h * h;
    if (periodic) return (f((i + 1) % n) - 2.0 * f(i) + f((i - 1 + n) % n)) / h2;
    if (i == 0) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
    if (i == n - 1) return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2;
    return (f(i + 1) - 2.0 * f(i) + f(i - 1)) / h2;
  }

  const GridSolution& g_;
  std::array<std::vector<double>, kFieldCount> fields_;
};

struct GridLiftOptions {
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  double tol = 5e-2;
};

struct GridResidualReport {
  ResidualReport residual;
  double tol = 5e-2;
  bool passed() const { return residual.passed(tol); }
};

/// Residual of the reduced equation assembled from the exact invariants at x
/// and interpolated grid derivatives at (y(x), z(x)). Points whose image
/// falls outside the grid margin are rejected and counted.
inline GridResidualReport lift_grid(const AnsatzSpec& spec, const GridSolution& grid,
                                    const Expr& F, const GridLiftOptions& opts = {}) {
  const Expr F_phi = rhs_in_phi(F);
  const ReductionResult rr = compute_invariants(spec);
  const GridInterpolant interp(grid);
  SampleRng rng(opts.seed);
  std::vector<std::vector<double>> points;
  std::size_t rejected = 0;
  for (std::size_t k = 0; k < opts.samples; ++k) {
    auto p = spec.domain.draw_valid(rng, spec.opaque);
    if (!p) {
      ++rejected;
      continue;
    }
    points.push_back(std::move(*p));
  }
  std::vector<detail::PointResidual> res(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      Binding b = spec.domain.bind(points[i]);
      const double yv = evaluate(spec.y, b, spec.opaque);
      const double zv = evaluate(spec.z, b, spec.opaque);
      if (!interp.covers(yv, zv)) return;
      const auto d = interp.sample(yv, zv);
      const double r = evaluate(rr.r, b, spec.opaque), q = evaluate(rr.q, b, spec.opaque);
      const double s = evaluate(rr.s, b, spec.opaque), R = evaluate(rr.R, b, spec.opaque);
      const double S = evaluate(rr.S, b, spec.opaque);
      const double lhs = r * d[GridInterpolant::kYY] + 2.0 * q * d[GridInterpolant::kYZ] +
                         s * d[GridInterpolant::kZZ] + R * d[GridInterpolant::kY] +
                         S * d[GridInterpolant::kZ];
      res[i].value = lhs - evaluate(F_phi, Binding{{"phi", d[GridInterpolant::kPhi]}});
      res[i].ok = true;
    } catch (const DomainError&) {
    }
  });
  LiftOptions summary_opts;
  summary_opts.max_rejected_fraction = 1.0;  // out-of-grid samples are only counted
  GridResidualReport out;
  out.residual = detail::summarize(points, res, rejected, summary_opts);
  out.tol = opts.tol;
  return out;
}

}  // namespace wavered
