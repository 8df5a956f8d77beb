#pragma once

// Immutable expression trees over coordinates, reduced-space variables and
// opaque functions. Every Expr is built through the smart constructors below,
// which keep trees in a light canonical form (flattened sums/products, folded
// exact constants, no neutral elements). There is no general simplifier.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavered/rational.hpp"

namespace wavered {

enum class Kind : std::uint8_t {
  Constant,
  Variable,
  Sum,
  Product,
  Power,
  Neg,
  Div,
  Func,
  Opaque
};

enum class Func : std::uint8_t { Sin, Cos, Exp, Ln, Sqrt, Arctan };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Arctan: return "arctan";
  }
  return "?";
}

class Expr;

namespace detail {

struct Node {
  Kind kind = Kind::Constant;
  bool exact = true;     // Constant: rational vs float
  Rational q;            // Constant (exact) / Power exponent
  double f = 0.0;        // Constant (float)
  std::string name;      // Variable / Opaque
  Func func = Func::Sin;
  unsigned order = 0;    // Opaque derivative order
  std::vector<Expr> args;
};

}  // namespace detail

class Expr {
 public:
  /// The exact constant 0.
  Expr();

  Kind kind() const { return node_->kind; }
  std::span<const Expr> args() const { return node_->args; }
  const Expr& arg(std::size_t i = 0) const { return node_->args[i]; }

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_exact() const { return is_constant() && node_->exact; }
  const Rational& rational() const { return node_->q; }
  double constant_value() const {
    return node_->exact ? node_->q.to_double() : node_->f;
  }
  bool is_exact_zero() const { return is_exact() && node_->q.is_zero(); }
  bool is_exact_one() const { return is_exact() && node_->q.is_one(); }

  const std::string& name() const { return node_->name; }
  Func func() const { return node_->func; }
  const Rational& exponent() const { return node_->q; }
  unsigned order() const { return node_->order; }

  /// Identity of the shared node; equal pointers imply equal trees.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  friend Expr make_node(detail::Node n);

  std::shared_ptr<const detail::Node> node_;
};

inline Expr make_node(detail::Node n) {
  return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

inline Expr constant(Rational q) {
  detail::Node n;
  n.kind = Kind::Constant;
  n.exact = true;
  n.q = q;
  return make_node(std::move(n));
}

inline Expr constant(std::int64_t k) { return constant(Rational(k)); }

/// Float constant. Values that are exactly small integers become exact.
inline Expr constant_float(double v) {
  if (std::isfinite(v) && std::nearbyint(v) == v && std::fabs(v) < 1e15)
    return constant(Rational(static_cast<std::int64_t>(v)));
  detail::Node n;
  n.kind = Kind::Constant;
  n.exact = false;
  n.f = v;
  return make_node(std::move(n));
}

/// Float constant kept as float even when integer valued.
inline Expr constant_raw_float(double v) {
  detail::Node n;
  n.kind = Kind::Constant;
  n.exact = false;
  n.f = v;
  return make_node(std::move(n));
}

inline Expr::Expr() : node_(constant(Rational(0)).node_) {}

inline Expr variable(std::string name) {
  detail::Node n;
  n.kind = Kind::Variable;
  n.name = std::move(name);
  return make_node(std::move(n));
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::Constant:
      if (x.exact != y.exact) return false;
      if (x.exact) return x.q == y.q;
      return std::memcmp(&x.f, &y.f, sizeof(double)) == 0;
    case Kind::Variable:
      return x.name == y.name;
    case Kind::Power:
      if (!(x.q == y.q)) return false;
      break;
    case Kind::Func:
      if (x.func != y.func) return false;
      break;
    case Kind::Opaque:
      if (x.name != y.name || x.order != y.order) return false;
      break;
    default:
      break;
  }
  if (x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!(x.args[i] == y.args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Smart constructors
// ---------------------------------------------------------------------------

namespace detail {

// Constant accumulator: exact while every input is exact.
struct ConstAcc {
  bool exact = true;
  Rational q;
  double f = 0.0;

  explicit ConstAcc(std::int64_t init) : q(init), f(static_cast<double>(init)) {}

  double value() const { return exact ? q.to_double() : f; }

  void add(const Expr& c) {
    if (exact && c.is_exact()) {
      try {
        q = q + c.rational();
        return;
      } catch (const RationalOverflow&) {
      }
    }
    f = value() + c.constant_value();
    exact = false;
  }
  void mul(const Expr& c) {
    if (exact && c.is_exact()) {
      try {
        q = q * c.rational();
        return;
      } catch (const RationalOverflow&) {
      }
    }
    f = value() * c.constant_value();
    exact = false;
  }
  void negate() {
    if (exact) {
      try {
        q = -q;
        return;
      } catch (const RationalOverflow&) {
        f = q.to_double();
        exact = false;
      }
    }
    f = -f;
  }
  bool is_value(double v) const { return value() == v; }
  Expr to_expr() const { return exact ? constant(q) : constant_raw_float(f); }
};

}  // namespace detail

Expr make_neg(const Expr& a);
Expr make_product(std::vector<Expr> factors);

inline Expr make_sum(std::vector<Expr> terms) {
  std::vector<Expr> out;
  out.reserve(terms.size());
  detail::ConstAcc acc(0);
  bool have_const = false;
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& c : t.args()) {
        if (c.is_constant()) {
          acc.add(c);
          have_const = true;
        } else {
          out.push_back(c);
        }
      }
    } else if (t.is_constant()) {
      acc.add(t);
      have_const = true;
    } else {
      out.push_back(std::move(t));
    }
  }
  if (have_const && !acc.is_value(0.0)) out.push_back(acc.to_expr());
  if (out.empty()) return constant(0);
  if (out.size() == 1) return out.front();
  detail::Node n;
  n.kind = Kind::Sum;
  n.args = std::move(out);
  return make_node(std::move(n));
}

inline Expr make_product(std::vector<Expr> factors) {
  std::vector<Expr> out;
  out.reserve(factors.size());
  detail::ConstAcc coef(1);
  bool negative = false;
  // Peel Neg wrappers and flatten nested products.
  std::vector<Expr> pending(factors.rbegin(), factors.rend());
  while (!pending.empty()) {
    Expr f = std::move(pending.back());
    pending.pop_back();
    switch (f.kind()) {
      case Kind::Neg:
        negative = !negative;
        pending.push_back(f.arg());
        break;
      case Kind::Product:
        for (auto it = f.args().rbegin(); it != f.args().rend(); ++it)
          pending.push_back(*it);
        break;
      case Kind::Constant:
        coef.mul(f);
        break;
      default:
        out.push_back(std::move(f));
    }
  }
  if (negative) coef.negate();
  if (coef.is_value(0.0)) return constant(0);
  Expr body;
  if (out.empty()) return coef.to_expr();
  if (out.size() == 1) {
    body = out.front();
  } else {
    detail::Node n;
    n.kind = Kind::Product;
    n.args = out;
    body = make_node(std::move(n));
  }
  if (coef.is_value(1.0)) return body;
  if (coef.is_value(-1.0)) {
    detail::Node n;
    n.kind = Kind::Neg;
    n.args = {body};
    return make_node(std::move(n));
  }
  detail::Node n;
  n.kind = Kind::Product;
  n.args.reserve(out.size() + 1);
  n.args.push_back(coef.to_expr());
  for (auto& f : out) n.args.push_back(std::move(f));
  return make_node(std::move(n));
}

inline Expr make_neg(const Expr& a) {
  switch (a.kind()) {
    case Kind::Constant: {
      detail::ConstAcc acc(0);
      acc.add(a);
      acc.negate();
      return acc.to_expr();
    }
    case Kind::Neg:
      return a.arg();
    case Kind::Product:
      if (a.arg(0).is_constant()) return make_product({constant(-1), a});
      break;
    default:
      break;
  }
  detail::Node n;
  n.kind = Kind::Neg;
  n.args = {a};
  return make_node(std::move(n));
}

inline Expr make_div(const Expr& num, const Expr& den) {
  if (den.is_exact() && !den.rational().is_zero()) {
    return make_product({constant(Rational(1) / den.rational()), num});
  }
  if (num.is_exact_zero() && !(den.is_exact() && den.rational().is_zero()))
    return constant(0);
  detail::Node n;
  n.kind = Kind::Div;
  n.args = {num, den};
  return make_node(std::move(n));
}

/// base^p for integer or half-integer p.
inline Expr make_pow(const Expr& base, const Rational& p) {
  if (p.den() != 1 && p.den() != 2)
    throw std::invalid_argument("exponent must be integer or half-integer, got " +
                                p.to_string());
  if (p.is_zero()) return constant(1);
  if (p.is_one()) return base;
  if (base.is_constant() && p.is_integer()) {
    if (base.is_exact()) {
      if (!(base.rational().is_zero() && p.is_negative())) {
        try {
          return constant(Rational::pow(base.rational(), p.num()));
        } catch (const RationalOverflow&) {
        }
      }
    } else {
      return constant_raw_float(
          std::pow(base.constant_value(), static_cast<double>(p.num())));
    }
  }
  if (base.is_exact_one()) return constant(1);
  if (p.is_integer()) {
    if (base.kind() == Kind::Neg) {
      Expr inner = make_pow(base.arg(), p);
      return (p.num() % 2 == 0) ? inner : make_neg(inner);
    }
    if (base.kind() == Kind::Power && base.exponent().is_integer()) {
      return make_pow(base.arg(), base.exponent() * p);
    }
  }
  detail::Node n;
  n.kind = Kind::Power;
  n.q = p;
  n.args = {base};
  return make_node(std::move(n));
}

inline Expr make_func(Func f, const Expr& a) {
  if (a.is_exact()) {
    const Rational& q = a.rational();
    if (q.is_zero()) {
      switch (f) {
        case Func::Sin:
        case Func::Sqrt:
        case Func::Arctan:
          return constant(0);
        case Func::Cos:
        case Func::Exp:
          return constant(1);
        default:
          break;
      }
    }
    if (q.is_one() && (f == Func::Ln)) return constant(0);
    if (q.is_one() && (f == Func::Sqrt)) return constant(1);
  }
  detail::Node n;
  n.kind = Kind::Func;
  n.func = f;
  n.args = {a};
  return make_node(std::move(n));
}

inline Expr make_opaque(std::string name, const Expr& a, unsigned order = 0) {
  detail::Node n;
  n.kind = Kind::Opaque;
  n.name = std::move(name);
  n.order = order;
  n.args = {a};
  return make_node(std::move(n));
}

inline Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
inline Expr operator-(const Expr& a) { return make_neg(a); }
inline Expr operator-(const Expr& a, const Expr& b) {
  return make_sum({a, make_neg(b)});
}
inline Expr operator*(const Expr& a, const Expr& b) {
  return make_product({a, b});
}
inline Expr operator/(const Expr& a, const Expr& b) { return make_div(a, b); }

inline Expr pow(const Expr& b, const Rational& p) { return make_pow(b, p); }
inline Expr sin(const Expr& a) { return make_func(Func::Sin, a); }
inline Expr cos(const Expr& a) { return make_func(Func::Cos, a); }
inline Expr exp(const Expr& a) { return make_func(Func::Exp, a); }
inline Expr ln(const Expr& a) { return make_func(Func::Ln, a); }
inline Expr sqrt(const Expr& a) { return make_func(Func::Sqrt, a); }
inline Expr arctan(const Expr& a) { return make_func(Func::Arctan, a); }

// ---------------------------------------------------------------------------
// Structural utilities
// ---------------------------------------------------------------------------

/// Rebuilds every node through the smart constructors. Idempotent.
inline Expr canonicalize(const Expr& e) {
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(canonicalize(a));
  switch (e.kind()) {
    case Kind::Constant:
      return e.is_exact() ? e : constant_raw_float(e.constant_value());
    case Kind::Variable:
      return e;
    case Kind::Sum:
      return make_sum(std::move(args));
    case Kind::Product:
      return make_product(std::move(args));
    case Kind::Power:
      return make_pow(args[0], e.exponent());
    case Kind::Neg:
      return make_neg(args[0]);
    case Kind::Div:
      return make_div(args[0], args[1]);
    case Kind::Func:
      return make_func(e.func(), args[0]);
    case Kind::Opaque:
      return make_opaque(e.name(), args[0], e.order());
  }
  return e;
}

using Substitution = std::map<std::string, Expr, std::less<>>;

inline Expr substitute(const Expr& e, const Substitution& sub) {
  if (e.kind() == Kind::Variable) {
    auto it = sub.find(e.name());
    return it == sub.end() ? e : it->second;
  }
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(substitute(a, sub));
    changed = changed || args.back().id() != a.id();
  }
  if (!changed) return e;
  switch (e.kind()) {
    case Kind::Sum: return make_sum(std::move(args));
    case Kind::Product: return make_product(std::move(args));
    case Kind::Power: return make_pow(args[0], e.exponent());
    case Kind::Neg: return make_neg(args[0]);
    case Kind::Div: return make_div(args[0], args[1]);
    case Kind::Func: return make_func(e.func(), args[0]);
    case Kind::Opaque: return make_opaque(e.name(), args[0], e.order());
    default: return e;
  }
}

inline Expr substitute(const Expr& e, const std::string& name, const Expr& by) {
  return substitute(e, Substitution{{name, by}});
}

namespace detail {
inline void collect(const Expr& e, std::set<std::string>& vars,
                    std::set<std::string>& opaques) {
  if (e.kind() == Kind::Variable) vars.insert(e.name());
  if (e.kind() == Kind::Opaque) opaques.insert(e.name());
  for (const auto& a : e.args()) collect(a, vars, opaques);
}
}  // namespace detail

inline std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> v, o;
  detail::collect(e, v, o);
  return v;
}

inline std::set<std::string> opaque_functions(const Expr& e) {
  std::set<std::string> v, o;
  detail::collect(e, v, o);
  return o;
}

inline std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args()) n += node_count(a);
  return n;
}

// ---------------------------------------------------------------------------
// Printing (reparseable by parse())
// ---------------------------------------------------------------------------

namespace detail {

enum Prec : int { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      if (e.is_exact()) {
        if (e.rational().is_negative()) return kUnary;
        return e.rational().is_integer() ? kAtom : kProduct;
      }
      return e.constant_value() < 0 || std::signbit(e.constant_value()) ? kUnary
                                                                         : kAtom;
    case Kind::Variable:
    case Kind::Func:
    case Kind::Opaque:
      return kAtom;
    case Kind::Sum:
      return kSum;
    case Kind::Product:
    case Kind::Div:
      return kProduct;
    case Kind::Neg:
      return kUnary;
    case Kind::Power:
      return kPower;
  }
  return kAtom;
}

std::string print(const Expr& e);

inline std::string wrap(const Expr& e, int min_prec) {
  std::string s = print(e);
  return precedence(e) >= min_prec ? s : "(" + s + ")";
}

inline std::string print_exponent(const Rational& p) {
  if (p.is_integer()) return p.to_string();
  return "(" + p.to_string() + ")";
}

inline std::string print(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      return e.is_exact() ? e.rational().to_string()
                          : format_double(e.constant_value());
    case Kind::Variable:
      return e.name();
    case Kind::Func:
      return std::string(func_name(e.func())) + "(" + print(e.arg()) + ")";
    case Kind::Opaque:
      return e.name() + std::string(e.order(), '\'') + "(" + print(e.arg()) + ")";
    case Kind::Neg:
      return "-" + wrap(e.arg(), kPower);
    case Kind::Power:
      return wrap(e.arg(), kAtom) + "^" + print_exponent(e.exponent());
    case Kind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        const Expr& f = e.arg(i);
        if (i > 0) s += "*";
        // A leading negative coefficient reads back as unary minus.
        if (i == 0 && f.is_constant() && precedence(f) == kUnary)
          s += print(f);
        else
          s += wrap(f, kPower);
      }
      return s;
    }
    case Kind::Div:
      return wrap(e.arg(0), kProduct) + "/" + wrap(e.arg(1), kPower);
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        const Expr& t = e.arg(i);
        if (i == 0) {
          s += wrap(t, kSum + 1);
          continue;
        }
        if (t.kind() == Kind::Neg) {
          s += " - " + wrap(t.arg(), kProduct);
        } else if (t.is_constant() && (t.is_exact() ? t.rational().is_negative()
                                                    : std::signbit(t.constant_value()))) {
          s += " - " + print(make_neg(t));
        } else if (t.kind() == Kind::Product && t.arg(0).is_constant() &&
                   precedence(t.arg(0)) == kUnary) {
          s += " - " + print(make_neg(t));
        } else {
          s += " + " + wrap(t, kSum + 1);
        }
      }
      return s;
    }
  }
  return "?";
}

}  // namespace detail

inline std::string to_string(const Expr& e) { return detail::print(e); }

}  // namespace wavered
