#pragma once

// Numerical solvers for the reduced two-dimensional equations and closed-form
// solution families. The variable y is the evolution variable for the
// hyperbolic equations.

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavered/diff.hpp"
#include "wavered/eval.hpp"
#include "wavered/expr.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, long last_stable_layer = -1,
                       std::vector<double> history = {})
      : std::runtime_error(what),
        last_stable_layer_(last_stable_layer),
        history_(std::move(history)) {}

  long last_stable_layer() const { return last_stable_layer_; }
  const std::vector<double>& residual_history() const { return history_; }

 private:
  long last_stable_layer_;
  std::vector<double> history_;
};

using Profile = std::function<double(double)>;
using Field2 = std::function<double(double, double)>;

struct GridMeta {
  std::string scheme;
  std::string boundary;
  double cfl = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  double final_update = 0.0;
  std::vector<double> residual_history;
};

/// phi sampled on a rectangular (y, z) grid, row-major in y. For periodic
/// grids the z nodes cover [z_min, z_min + nz*hz) and wrap around.
struct GridSolution {
  double y_min = 0.0, z_min = 0.0;
  double hy = 0.0, hz = 0.0;
  std::size_t ny = 0, nz = 0;
  bool periodic_z = false;
  std::vector<double> values;
  GridMeta meta;

  double y(std::size_t i) const { return y_min + hy * static_cast<double>(i); }
  double z(std::size_t j) const { return z_min + hz * static_cast<double>(j); }
  double y_max() const { return y(ny - 1); }
  double z_max() const { return periodic_z ? z(nz) : z(nz - 1); }
  double at(std::size_t i, std::size_t j) const { return values[i * nz + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * nz + j]; }

  /// Dimensions match the value array and every value is finite.
  bool consistent() const {
    if (values.size() != ny * nz || ny == 0 || nz == 0) return false;
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// A right-hand side F(phi, y, z) with its phi-derivative, compiled from an
/// expression. The names u and phi are interchangeable.
class RightHandSide {
 public:
  explicit RightHandSide(const Expr& F) : F_(substitute(F, "u", variable("phi"))) {
    for (const auto& v : free_variables(F_))
      if (v != "phi" && v != "y" && v != "z")
        throw std::invalid_argument("right-hand side may only use phi, y, z; found '" + v +
                                    "'");
    dF_ = diff(F_, "phi");
  }

  double operator()(double phi, double y = 0.0, double z = 0.0) const {
    return evaluate(F_, bind(phi, y, z));
  }
  double derivative(double phi, double y = 0.0, double z = 0.0) const {
    return evaluate(dF_, bind(phi, y, z));
  }
  bool is_zero_function() const { return F_.is_exact_zero(); }
  const Expr& expr() const { return F_; }

 private:
  static Binding bind(double phi, double y, double z) {
    return Binding{{"phi", phi}, {"y", y}, {"z", z}};
  }
  Expr F_;
  Expr dF_;
};

enum class BoundaryKind { Periodic, Dirichlet };

namespace detail {

struct LeapfrogSetup {
  std::size_t steps;
  double hy;
  double y0;
  // Fills acc[j] with phi_yy implied by the equation on layer u at height y.
  std::function<void(double y, const std::vector<double>& u, std::vector<double>& acc)> accel;
  // Overwrites boundary nodes of layer u at height y (no-op when periodic).
  std::function<void(double y, std::vector<double>& u)> boundary;
};

inline void leapfrog(const std::vector<double>& u0, const std::vector<double>& v0,
                     const LeapfrogSetup& s, GridSolution& g) {
  const std::size_t nz = u0.size();
  g.values.assign((s.steps + 1) * nz, 0.0);
  std::vector<double> prev = u0, cur(nz), next(nz), acc(nz, 0.0);
  std::copy(u0.begin(), u0.end(), g.values.begin());
  const double h2 = s.hy * s.hy;
  // F overflowing on a finite layer is a blow-up of the solution, not bad input.
  auto accel = [&](double y, const std::vector<double>& u, std::size_t layer) {
    try {
      s.accel(y, u, acc);
    } catch (const DomainError& e) {
      throw SolverError(std::string("blow-up at layer ") + std::to_string(layer + 1) + ": " +
                            e.what(),
                        static_cast<long>(layer));
    }
  };
  accel(s.y0, prev, 0);
  for (std::size_t j = 0; j < nz; ++j) cur[j] = prev[j] + s.hy * v0[j] + 0.5 * h2 * acc[j];
  s.boundary(s.y0 + s.hy, cur);
  auto store = [&](std::size_t layer, const std::vector<double>& u) {
    for (std::size_t j = 0; j < nz; ++j) {
      if (!std::isfinite(u[j]))
        throw SolverError("non-finite value at layer " + std::to_string(layer),
                          static_cast<long>(layer) - 1);
      g.values[layer * nz + j] = u[j];
    }
  };
  store(1, cur);
  for (std::size_t n = 1; n < s.steps; ++n) {
    const double y = s.y0 + s.hy * static_cast<double>(n);
    accel(y, cur, n);
    for (std::size_t j = 0; j < nz; ++j) next[j] = 2.0 * cur[j] - prev[j] + h2 * acc[j];
    s.boundary(y + s.hy, next);
    store(n + 1, next);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
}

inline std::size_t step_count(double length, double h) {
  if (!(h > 0.0) || !(length > 0.0)) throw std::invalid_argument("steps and lengths must be positive");
  return static_cast<std::size_t>(std::ceil(length / h - 1e-9));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// phi_yy - phi_zz = F(phi)
// ---------------------------------------------------------------------------

struct Wave1p1Problem {
  Expr F;
  Profile phi0;   // phi(0, z)
  Profile dphi0;  // phi_y(0, z)
  double z_min = 0.0, z_max = 1.0;
  double T = 1.0;
  double hy = 0.01, hz = 0.01;
  BoundaryKind boundary = BoundaryKind::Periodic;
  Field2 dirichlet;  // boundary values g(y, z) for Dirichlet
};

/// Explicit leapfrog with a second-order Taylor start.
inline GridSolution solve_wave_1p1(const Wave1p1Problem& p) {
  RightHandSide F(p.F);
  const double L = p.z_max - p.z_min;
  GridSolution g;
  g.periodic_z = p.boundary == BoundaryKind::Periodic;
  if (g.periodic_z) {
    g.nz = static_cast<std::size_t>(std::llround(L / p.hz));
    g.hz = L / static_cast<double>(g.nz);
  } else {
    if (!p.dirichlet) throw std::invalid_argument("Dirichlet boundary needs boundary data");
    g.nz = static_cast<std::size_t>(std::llround(L / p.hz)) + 1;
    g.hz = L / static_cast<double>(g.nz - 1);
  }
  const std::size_t steps = detail::step_count(p.T, p.hy);
  g.hy = p.T / static_cast<double>(steps);
  g.ny = steps + 1;
  g.y_min = 0.0;
  g.z_min = p.z_min;
  g.meta.scheme = "leapfrog";
  g.meta.boundary = g.periodic_z ? "periodic" : "dirichlet";
  g.meta.cfl = g.hy / g.hz;
  g.meta.iterations = steps;
  if (g.meta.cfl > 1.0 + 1e-12)
    throw SolverError("CFL violation: hy/hz = " + std::to_string(g.meta.cfl) + " > 1");

  const std::size_t nz = g.nz;
  const double inv_hz2 = 1.0 / (g.hz * g.hz);
  std::vector<double> u0(nz), v0(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    u0[j] = p.phi0(g.z(j));
    v0[j] = p.dphi0(g.z(j));
  }
  detail::LeapfrogSetup s;
  s.steps = steps;
  s.hy = g.hy;
  s.y0 = 0.0;
  const bool periodic = g.periodic_z;
  s.accel = [&](double y, const std::vector<double>& u, std::vector<double>& acc) {
    for (std::size_t j = 0; j < nz; ++j) {
      if (!periodic && (j == 0 || j + 1 == nz)) {
        acc[j] = 0.0;
        continue;
      }
      const double um = u[j == 0 ? nz - 1 : j - 1];
      const double up = u[j + 1 == nz ? 0 : j + 1];
      acc[j] = (up - 2.0 * u[j] + um) * inv_hz2 + F(u[j], y, g.z(j));
    }
  };
  s.boundary = [&](double y, std::vector<double>& u) {
    if (periodic) return;
    u[0] = p.dirichlet(y, g.z(0));
    u[nz - 1] = p.dirichlet(y, g.z(nz - 1));
  };
  detail::leapfrog(u0, v0, s, g);
  return g;
}

// ---------------------------------------------------------------------------
// phi_yy - phi_zz - (2/z) phi_z = F(phi)
// ---------------------------------------------------------------------------

struct RadialWaveProblem {
  Expr F;
  Profile phi0;
  Profile dphi0;
  double z_min = 0.5, z_max = 2.0;  // z_min > 0
  double T = 1.0;
  double hy = 0.01, hz = 0.01;
  Field2 dirichlet;  // required on both z boundaries
  /// Evolve psi = z*phi, which satisfies psi_yy - psi_zz = z F(psi/z).
  bool psi_substitution = false;
};

inline GridSolution solve_radial_wave(const RadialWaveProblem& p) {
  if (!(p.z_min > 0.0)) throw std::invalid_argument("radial wave needs z_min > 0");
  if (!p.dirichlet) throw std::invalid_argument("radial wave needs Dirichlet data");
  RightHandSide F(p.F);
  const double L = p.z_max - p.z_min;
  GridSolution g;
  g.nz = static_cast<std::size_t>(std::llround(L / p.hz)) + 1;
  g.hz = L / static_cast<double>(g.nz - 1);
  const std::size_t steps = detail::step_count(p.T, p.hy);
  g.hy = p.T / static_cast<double>(steps);
  g.ny = steps + 1;
  g.z_min = p.z_min;
  g.meta.scheme = p.psi_substitution ? "leapfrog-psi" : "leapfrog-radial";
  g.meta.boundary = "dirichlet";
  g.meta.cfl = g.hy / g.hz;
  g.meta.iterations = steps;
  if (g.meta.cfl > 1.0 + 1e-12)
    throw SolverError("CFL violation: hy/hz = " + std::to_string(g.meta.cfl) + " > 1");

  const std::size_t nz = g.nz;
  const double inv_hz2 = 1.0 / (g.hz * g.hz);
  const double inv_2hz = 0.5 / g.hz;
  const bool psi = p.psi_substitution;
  std::vector<double> u0(nz), v0(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    const double zj = g.z(j);
    const double w = psi ? zj : 1.0;
    u0[j] = w * p.phi0(zj);
    v0[j] = w * p.dphi0(zj);
  }
  detail::LeapfrogSetup s;
  s.steps = steps;
  s.hy = g.hy;
  s.y0 = 0.0;
  s.accel = [&](double y, const std::vector<double>& u, std::vector<double>& acc) {
    acc[0] = acc[nz - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < nz; ++j) {
      const double zj = g.z(j);
      const double lap = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_hz2;
      if (psi) {
        acc[j] = lap + zj * F(u[j] / zj, y, zj);
      } else {
        acc[j] = lap + (2.0 / zj) * (u[j + 1] - u[j - 1]) * inv_2hz + F(u[j], y, zj);
      }
    }
  };
  s.boundary = [&](double y, std::vector<double>& u) {
    const double z0 = g.z(0), z1 = g.z(nz - 1);
    u[0] = (psi ? z0 : 1.0) * p.dirichlet(y, z0);
    u[nz - 1] = (psi ? z1 : 1.0) * p.dirichlet(y, z1);
  };
  detail::leapfrog(u0, v0, s, g);
  if (psi)
    for (std::size_t i = 0; i < g.ny; ++i)
      for (std::size_t j = 0; j < nz; ++j) g.at(i, j) /= g.z(j);
  return g;
}

// ---------------------------------------------------------------------------
// -phi_zz - phi_yy = F(phi) on a rectangle
// ---------------------------------------------------------------------------

struct EllipticProblem {
  Expr F;  // in phi, may also depend on y, z (manufactured sources)
  double y_min = 0.0, y_max = 1.0, z_min = 0.0, z_max = 1.0;
  double hy = 0.02, hz = 0.02;
  Field2 boundary;
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  /// Relaxation factor of the pointwise Newton update (1 = Gauss-Seidel).
  double relaxation = 1.0;
};

/// Pointwise Newton linearisation with Gauss-Seidel sweeps over the 5-point
/// Laplacian; converged when the largest update drops below tol.
inline GridSolution solve_elliptic(const EllipticProblem& p) {
  if (!p.boundary) throw std::invalid_argument("elliptic solver needs boundary data");
  RightHandSide F(p.F);
  GridSolution g;
  g.ny = static_cast<std::size_t>(std::llround((p.y_max - p.y_min) / p.hy)) + 1;
  g.nz = static_cast<std::size_t>(std::llround((p.z_max - p.z_min) / p.hz)) + 1;
  if (g.ny < 3 || g.nz < 3) throw std::invalid_argument("elliptic grid needs interior nodes");
  g.hy = (p.y_max - p.y_min) / static_cast<double>(g.ny - 1);
  g.hz = (p.z_max - p.z_min) / static_cast<double>(g.nz - 1);
  g.y_min = p.y_min;
  g.z_min = p.z_min;
  g.values.assign(g.ny * g.nz, 0.0);
  g.meta.scheme = "newton-gauss-seidel";
  g.meta.boundary = "dirichlet";
  for (std::size_t i = 0; i < g.ny; ++i)
    for (std::size_t j = 0; j < g.nz; ++j)
      if (i == 0 || j == 0 || i + 1 == g.ny || j + 1 == g.nz)
        g.at(i, j) = p.boundary(g.y(i), g.z(j));

  const double cy = 1.0 / (g.hy * g.hy);
  const double cz = 1.0 / (g.hz * g.hz);
  const double diag = 2.0 * cy + 2.0 * cz;
  for (std::size_t it = 1; it <= p.max_iter; ++it) {
    double max_update = 0.0;
    for (std::size_t i = 1; i + 1 < g.ny; ++i) {
      for (std::size_t j = 1; j + 1 < g.nz; ++j) {
        const double u = g.at(i, j);
        const double yi = g.y(i), zj = g.z(j);
        const double res = diag * u - cy * (g.at(i - 1, j) + g.at(i + 1, j)) -
                           cz * (g.at(i, j - 1) + g.at(i, j + 1)) - F(u, yi, zj);
        const double jac = diag - F.derivative(u, yi, zj);
        const double du = -p.relaxation * res / jac;
        g.at(i, j) = u + du;
        max_update = std::max(max_update, std::fabs(du));
      }
    }
    g.meta.residual_history.push_back(max_update);
    g.meta.iterations = it;
    g.meta.final_update = max_update;
    if (!std::isfinite(max_update))
      throw SolverError("elliptic iteration diverged", -1, g.meta.residual_history);
    if (max_update < p.tol) {
      g.meta.converged = true;
      return g;
    }
  }
  throw SolverError("elliptic iteration did not converge in " + std::to_string(p.max_iter) +
                        " sweeps",
                    -1, g.meta.residual_history);
}

// ---------------------------------------------------------------------------
// -phi_yy - (1/y) phi_y = F(phi)
// ---------------------------------------------------------------------------

struct RadialOdeProblem {
  Expr F;
  double y0 = 1.0, y1 = 10.0;
  double phi0 = 0.0, dphi0 = 0.0;
  double step = 1e-3;
  /// Largest tolerated size of the first omitted series term when y0 = 0.
  double series_tol = 1e-10;
};

struct RadialOdeSolution {
  std::vector<double> y, phi, dphi;
  double series_error = 0.0;
};

/// Fourth-order Runge-Kutta on (phi, phi'). Starting at y0 = 0 requires
/// phi'(0) = 0 and takes one series step phi(h) = phi0 - F(phi0) h^2 / 4.
inline RadialOdeSolution solve_radial_ode(const RadialOdeProblem& p) {
  if (p.y0 < 0.0) throw std::invalid_argument("radial ODE needs y0 >= 0");
  if (!(p.y1 > p.y0)) throw std::invalid_argument("radial ODE needs y1 > y0");
  RightHandSide F(p.F);
  const std::size_t n = detail::step_count(p.y1 - p.y0, p.step);
  const double h = (p.y1 - p.y0) / static_cast<double>(n);
  RadialOdeSolution sol;
  sol.y.reserve(n + 1);
  sol.phi.reserve(n + 1);
  sol.dphi.reserve(n + 1);
  sol.y.push_back(p.y0);
  sol.phi.push_back(p.phi0);
  sol.dphi.push_back(p.dphi0);
  std::size_t start = 0;
  if (p.y0 == 0.0) {
    if (p.dphi0 != 0.0)
      throw std::invalid_argument("regular start at y = 0 needs phi'(0) = 0");
    // phi = phi0 + c2 y^2 + c4 y^4 + ...: 4 c2 = -F(phi0), 16 c4 = -F'(phi0) c2.
    const double c2 = -F(p.phi0, 0.0) / 4.0;
    const double c4 = -F.derivative(p.phi0, 0.0) * c2 / 16.0;
    sol.series_error = std::fabs(c4) * h * h * h * h;
    if (sol.series_error > p.series_tol)
      throw SolverError("step too large near y = 0: series term " +
                        std::to_string(sol.series_error) + " exceeds tolerance");
    sol.y.push_back(h);
    sol.phi.push_back(p.phi0 + c2 * h * h);
    sol.dphi.push_back(2.0 * c2 * h);
    start = 1;
  }
  auto rhs = [&](double y, double phi, double dphi, double& dphi_out, double& ddphi_out) {
    dphi_out = dphi;
    ddphi_out = -dphi / y - F(phi, y);
  };
  double y = sol.y.back(), u = sol.phi.back(), v = sol.dphi.back();
  for (std::size_t k = start; k < n; ++k) {
    double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(y, u, v, k1u, k1v);
    rhs(y + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
    rhs(y + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
    rhs(y + h, u + h * k3u, v + h * k3v, k4u, k4v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    y = p.y0 + h * static_cast<double>(k + 1);
    if (!std::isfinite(u) || !std::isfinite(v))
      throw SolverError("non-finite value at step " + std::to_string(k + 1),
                        static_cast<long>(k));
    sol.y.push_back(y);
    sol.phi.push_back(u);
    sol.dphi.push_back(v);
  }
  return sol;
}

/// Extends a radial profile phi(y) to a grid constant in z.
inline GridSolution radial_to_grid(const RadialOdeSolution& sol, double z_min, double z_max,
                                   std::size_t nz) {
  GridSolution g;
  g.ny = sol.y.size();
  g.nz = nz;
  g.y_min = sol.y.front();
  g.hy = (sol.y.back() - sol.y.front()) / static_cast<double>(g.ny - 1);
  g.z_min = z_min;
  g.hz = (z_max - z_min) / static_cast<double>(nz - 1);
  g.values.resize(g.ny * nz);
  for (std::size_t i = 0; i < g.ny; ++i)
    for (std::size_t j = 0; j < nz; ++j) g.at(i, j) = sol.phi[i];
  g.meta.scheme = "rk4-radial";
  g.meta.boundary = "initial-value";
  g.meta.iterations = g.ny - 1;
  return g;
}

// ---------------------------------------------------------------------------
// Closed-form solution families
// ---------------------------------------------------------------------------

struct ClosedFormSolution {
  std::string name;
  std::map<std::string, double> params;
  Expr expr;             // in (y, z)
  SamplingBox validity;  // over (y, z)
};

/// Sine-Gordon kink 4 arctan(exp(sign (y - c z + shift) / sqrt(1 - c^2))),
/// a solution of phi_yy - phi_zz = sin(phi) moving with speed c.
inline ClosedFormSolution kink_solution(double c, int sign = 1, double shift = 0.0) {
  if (!(std::fabs(c) < 1.0)) throw std::invalid_argument("kink speed must satisfy |c| < 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("kink sign must be +1 or -1");
  const double gamma = std::sqrt(1.0 - c * c);
  const Expr y = variable("y"), z = variable("z");
  Expr xi = make_sum({y, make_neg(constant_float(c) * z), constant_float(shift)});
  Expr arg = constant_float(sign / gamma) * xi;
  ClosedFormSolution s;
  s.name = "kink";
  s.params = {{"c", c}, {"sign", sign}, {"shift", shift}};
  s.expr = constant(4) * arctan(exp(arg));
  s.validity = SamplingBox::cube({"y", "z"}, -20.0, 20.0);
  return s;
}

/// General solution of phi_yy - phi_zz = exp(phi) in light-cone variables
/// xi = y + z, eta = y - z:
///   phi = ln(8 f'(xi) g'(eta) / (f(xi) + g(eta))^2)
/// with monotone increasing seeds f, g given as expressions in t.
inline ClosedFormSolution liouville_solution(const Expr& f, const Expr& g,
                                             SamplingBox validity) {
  for (const Expr* e : {&f, &g})
    for (const auto& v : free_variables(*e))
      if (v != "t") throw std::invalid_argument("Liouville seeds must be functions of t");
  const Expr y = variable("y"), z = variable("z");
  const Expr xi = y + z, eta = y - z;
  const Expr fx = substitute(f, "t", xi);
  const Expr gx = substitute(g, "t", eta);
  const Expr dfx = substitute(diff(f, "t"), "t", xi);
  const Expr dgx = substitute(diff(g, "t"), "t", eta);
  ClosedFormSolution s;
  s.name = "liouville";
  s.expr = ln(make_div(make_product({constant(8), dfx, dgx}),
                       make_pow(fx + gx, Rational(2))));
  s.validity = std::move(validity);
  return s;
}

}  // namespace wavered
