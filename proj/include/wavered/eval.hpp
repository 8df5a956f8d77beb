#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavered/expr.hpp"
#include "wavered/jet.hpp"

namespace wavered {

/// Raised when an expression is evaluated outside its domain: ln of a
/// non-positive number, sqrt of a negative one, division by zero, or a
/// non-finite intermediate. Carries the offending subtree.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, const Expr& subtree)
      : std::runtime_error(what + " in '" + to_string(subtree) + "'"),
        subtree_(to_string(subtree)) {}
  const std::string& subtree() const { return subtree_; }

 private:
  std::string subtree_;
};

/// Variable name -> value. A flat list: bindings hold a handful of names.
class Binding {
 public:
  Binding() = default;
  Binding(std::initializer_list<std::pair<std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }

  void set(std::string_view name, double value) {
    for (auto& [k, v] : slots_)
      if (k == name) {
        v = value;
        return;
      }
    slots_.emplace_back(std::string(name), value);
  }
  const double* find(std::string_view name) const {
    for (const auto& [k, v] : slots_)
      if (k == name) return &v;
    return nullptr;
  }
  double at(std::string_view name) const {
    if (const double* p = find(name)) return *p;
    throw std::invalid_argument("unbound variable '" + std::string(name) + "'");
  }
  const auto& slots() const { return slots_; }

 private:
  std::vector<std::pair<std::string, double>> slots_;
};

/// Concrete implementation of an opaque function: returns the order-th
/// derivative at t.
using OpaqueFn = std::function<double(unsigned order, double t)>;
using OpaqueTable = std::map<std::string, OpaqueFn, std::less<>>;

/// Built-in seed functions selectable by name: square (t^2), sin, exp,
/// cubic (t^3 - t).
inline OpaqueFn builtin_opaque(std::string_view name) {
  if (name == "square")
    return [](unsigned k, double t) {
      switch (k) {
        case 0: return t * t;
        case 1: return 2.0 * t;
        case 2: return 2.0;
        default: return 0.0;
      }
    };
  if (name == "sin")
    return [](unsigned k, double t) {
      switch (k % 4) {
        case 0: return std::sin(t);
        case 1: return std::cos(t);
        case 2: return -std::sin(t);
        default: return -std::cos(t);
      }
    };
  if (name == "exp") return [](unsigned, double t) { return std::exp(t); };
  if (name == "cubic")
    return [](unsigned k, double t) {
      switch (k) {
        case 0: return t * t * t - t;
        case 1: return 3.0 * t * t - 1.0;
        case 2: return 6.0 * t;
        case 3: return 6.0;
        default: return 0.0;
      }
    };
  throw std::invalid_argument("unknown builtin opaque function '" + std::string(name) +
                              "' (expected square|sin|exp|cubic)");
}

namespace detail {

struct Derivs {
  double f, df, d2f;
};

inline Derivs func_derivs(Func fn, double a, const Expr& node, bool need_derivs) {
  switch (fn) {
    case Func::Sin: {
      double s = std::sin(a), c = std::cos(a);
      return {s, c, -s};
    }
    case Func::Cos: {
      double s = std::sin(a), c = std::cos(a);
      return {c, -s, -c};
    }
    case Func::Exp: {
      double e = std::exp(a);
      return {e, e, e};
    }
    case Func::Ln:
      if (!(a > 0.0)) throw DomainError("ln of non-positive value", node);
      return {std::log(a), 1.0 / a, -1.0 / (a * a)};
    case Func::Sqrt: {
      if (a < 0.0) throw DomainError("sqrt of negative value", node);
      if (need_derivs && a == 0.0) throw DomainError("sqrt not differentiable at 0", node);
      double s = std::sqrt(a);
      if (!need_derivs) return {s, 0.0, 0.0};
      return {s, 0.5 / s, -0.25 / (s * a)};
    }
    case Func::Arctan: {
      double d = 1.0 / (1.0 + a * a);
      return {std::atan(a), d, -2.0 * a * d * d};
    }
  }
  return {0, 0, 0};
}

inline Derivs power_derivs(double b, const Rational& p, const Expr& node,
                           bool need_derivs) {
  const double pd = p.to_double();
  if (!p.is_integer() && b < 0.0)
    throw DomainError("fractional power of negative value", node);
  if (b == 0.0) {
    if (p.is_negative()) throw DomainError("division by zero", node);
    if (need_derivs && !p.is_integer() && pd < 2.0)
      throw DomainError("power not differentiable at 0", node);
  }
  double f = std::pow(b, pd);
  if (!need_derivs) return {f, 0.0, 0.0};
  double df = pd * std::pow(b, pd - 1.0);
  double d2f = (pd == 1.0) ? 0.0 : pd * (pd - 1.0) * std::pow(b, pd - 2.0);
  return {f, df, d2f};
}

inline const OpaqueFn& find_opaque(const OpaqueTable& table, const Expr& e) {
  auto it = table.find(e.name());
  if (it == table.end())
    throw std::invalid_argument("no implementation for opaque function '" + e.name() +
                                "'");
  return it->second;
}

inline void check_finite(double v, const Expr& node) {
  if (!std::isfinite(v)) throw DomainError("non-finite value", node);
}

inline double eval_value(const Expr& e, const Binding& b, const OpaqueTable& op,
                         double* max_abs) {
  double r = 0.0;
  switch (e.kind()) {
    case Kind::Constant:
      r = e.constant_value();
      break;
    case Kind::Variable:
      r = b.at(e.name());
      break;
    case Kind::Sum:
      for (const auto& a : e.args()) r += eval_value(a, b, op, max_abs);
      break;
    case Kind::Product:
      r = 1.0;
      for (const auto& a : e.args()) r *= eval_value(a, b, op, max_abs);
      break;
    case Kind::Neg:
      r = -eval_value(e.arg(), b, op, max_abs);
      break;
    case Kind::Div: {
      double n = eval_value(e.arg(0), b, op, max_abs);
      double d = eval_value(e.arg(1), b, op, max_abs);
      if (d == 0.0) throw DomainError("division by zero", e);
      r = n / d;
      break;
    }
    case Kind::Power:
      r = power_derivs(eval_value(e.arg(), b, op, max_abs), e.exponent(), e, false).f;
      break;
    case Kind::Func:
      r = func_derivs(e.func(), eval_value(e.arg(), b, op, max_abs), e, false).f;
      break;
    case Kind::Opaque:
      r = find_opaque(op, e)(e.order(), eval_value(e.arg(), b, op, max_abs));
      break;
  }
  check_finite(r, e);
  if (max_abs && std::fabs(r) > *max_abs) *max_abs = std::fabs(r);
  return r;
}

struct JetContext {
  const Binding& binding;
  const OpaqueTable& opaque;
  const std::vector<std::string>& active;
};

inline Jet2 eval_jet(const Expr& e, const JetContext& ctx) {
  const std::size_t n = ctx.active.size();
  switch (e.kind()) {
    case Kind::Constant:
      return Jet2(n, e.constant_value());
    case Kind::Variable: {
      double v = ctx.binding.at(e.name());
      for (std::size_t i = 0; i < n; ++i)
        if (ctx.active[i] == e.name()) return Jet2::variable(n, i, v);
      return Jet2(n, v);
    }
    case Kind::Sum: {
      Jet2 r(n, 0.0);
      for (const auto& a : e.args()) r = r + eval_jet(a, ctx);
      return r;
    }
    case Kind::Product: {
      Jet2 r = eval_jet(e.arg(0), ctx);
      for (std::size_t i = 1; i < e.args().size(); ++i) r = r * eval_jet(e.arg(i), ctx);
      check_finite(r.value(), e);
      return r;
    }
    case Kind::Neg:
      return -eval_jet(e.arg(), ctx);
    case Kind::Div: {
      Jet2 num = eval_jet(e.arg(0), ctx);
      Jet2 den = eval_jet(e.arg(1), ctx);
      if (den.value() == 0.0) throw DomainError("division by zero", e);
      return num / den;
    }
    case Kind::Power: {
      Jet2 a = eval_jet(e.arg(), ctx);
      auto d = power_derivs(a.value(), e.exponent(), e, true);
      Jet2 r = chain(a, d.f, d.df, d.d2f);
      check_finite(r.value(), e);
      return r;
    }
    case Kind::Func: {
      Jet2 a = eval_jet(e.arg(), ctx);
      auto d = func_derivs(e.func(), a.value(), e, true);
      Jet2 r = chain(a, d.f, d.df, d.d2f);
      check_finite(r.value(), e);
      return r;
    }
    case Kind::Opaque: {
      Jet2 a = eval_jet(e.arg(), ctx);
      const OpaqueFn& fn = find_opaque(ctx.opaque, e);
      const unsigned k = e.order();
      double t = a.value();
      Jet2 r = chain(a, fn(k, t), fn(k + 1, t), fn(k + 2, t));
      check_finite(r.value(), e);
      return r;
    }
  }
  return Jet2(n);
}

inline const OpaqueTable& empty_opaque_table() {
  static const OpaqueTable table;
  return table;
}

}  // namespace detail

/// Numeric value of e. When max_abs is given it receives the largest
/// magnitude of any subterm, used as a scale for relative zero tests.
inline double evaluate(const Expr& e, const Binding& binding,
                       const OpaqueTable& opaque = detail::empty_opaque_table(),
                       double* max_abs = nullptr) {
  return detail::eval_value(e, binding, opaque, max_abs);
}

/// Value, gradient and Hessian of e with respect to the active variables.
/// Every free variable (active or not) must be bound.
inline Jet2 eval_jet(const Expr& e, const Binding& binding,
                     const std::vector<std::string>& active,
                     const OpaqueTable& opaque = detail::empty_opaque_table()) {
  detail::JetContext ctx{binding, opaque, active};
  Jet2 r = detail::eval_jet(e, ctx);
  detail::check_finite(r.value(), e);
  for (std::size_t i = 0; i < r.size(); ++i) {
    detail::check_finite(r.grad(i), e);
    for (std::size_t j = i; j < r.size(); ++j) detail::check_finite(r.hess(i, j), e);
  }
  return r;
}

}  // namespace wavered
