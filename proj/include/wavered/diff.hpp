#pragma once

#include <string>
#include <vector>

#include "wavered/expr.hpp"

namespace wavered {

/// Exact partial derivative. Opaque functions pick up one derivative order
/// per application of the chain rule; rational constants stay exact.
inline Expr diff(const Expr& e, const std::string& v) {
  switch (e.kind()) {
    case Kind::Constant:
      return constant(0);
    case Kind::Variable:
      return constant(e.name() == v ? 1 : 0);
    case Kind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(e.args().size());
      for (const auto& t : e.args()) terms.push_back(diff(t, v));
      return make_sum(std::move(terms));
    }
    case Kind::Product: {
      std::vector<Expr> terms;
      const auto factors = e.args();
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Expr d = diff(factors[i], v);
        if (d.is_exact_zero()) continue;
        std::vector<Expr> p(factors.begin(), factors.end());
        p[i] = d;
        terms.push_back(make_product(std::move(p)));
      }
      return make_sum(std::move(terms));
    }
    case Kind::Neg:
      return make_neg(diff(e.arg(), v));
    case Kind::Div: {
      const Expr& n = e.arg(0);
      const Expr& d = e.arg(1);
      Expr dn = diff(n, v);
      Expr dd = diff(d, v);
      if (dd.is_exact_zero()) return make_div(dn, d);
      Expr numer = make_sum({make_product({dn, d}), make_neg(make_product({n, dd}))});
      return make_div(numer, make_pow(d, Rational(2)));
    }
    case Kind::Power: {
      Expr db = diff(e.arg(), v);
      if (db.is_exact_zero()) return constant(0);
      const Rational& p = e.exponent();
      return make_product({constant(p), make_pow(e.arg(), p - Rational(1)), db});
    }
    case Kind::Func: {
      const Expr& a = e.arg();
      Expr da = diff(a, v);
      if (da.is_exact_zero()) return constant(0);
      switch (e.func()) {
        case Func::Sin: return make_product({cos(a), da});
        case Func::Cos: return make_neg(make_product({sin(a), da}));
        case Func::Exp: return make_product({e, da});
        case Func::Ln: return make_div(da, a);
        case Func::Sqrt: return make_div(da, make_product({constant(2), e}));
        case Func::Arctan:
          return make_div(da, make_sum({constant(1), make_pow(a, Rational(2))}));
      }
      return constant(0);
    }
    case Kind::Opaque: {
      Expr da = diff(e.arg(), v);
      if (da.is_exact_zero()) return constant(0);
      return make_product({make_opaque(e.name(), e.arg(), e.order() + 1), da});
    }
  }
  return constant(0);
}

/// Repeated differentiation with respect to the same variable.
inline Expr diff(const Expr& e, const std::string& v, unsigned times) {
  Expr r = e;
  for (unsigned i = 0; i < times; ++i) r = diff(r, v);
  return r;
}

}  // namespace wavered
