#pragma once

// Recursive-descent parser for the expression grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' exponent)?
//   base   := number | ident | ident '(' expr ')' | '(' expr ')'
//   exponent := signed integer, or a parenthesised signed rational: 2, -1, (1/2), (-3/2)
//
// Unary minus binds looser than '^', so "-x^2" is -(x^2).

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wavered/expr.hpp"

namespace wavered {

enum class ParseErrorKind { Syntax, UnknownIdentifier, Arity };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& msg)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)),
        kind_(kind),
        offset_(offset) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

/// Names accepted as free variables: coordinates x0..x3, reduced-space
/// variables y, z, v, w, vs (the conjugate slot), lam, plus phi/u for
/// right-hand sides and t for one-variable seed functions.
inline bool is_known_variable(std::string_view id) {
  static constexpr std::string_view kNames[] = {
      "x0", "x1", "x2", "x3", "y", "z", "v", "w", "vs", "lam", "phi", "u", "t"};
  for (auto n : kNames)
    if (n == id) return true;
  return false;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail(ParseErrorKind::Syntax, pos_,
           std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind k, std::size_t at, const std::string& m) {
    throw ParseError(k, at, m);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) {
      skip_ws();
      fail(ParseErrorKind::Syntax, pos_,
           std::string("expected '") + c + "'" +
               (pos_ < text_.size() ? std::string(", found '") + text_[pos_] + "'"
                                    : std::string(", found end of input")));
    }
  }

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(parse_term());
      } else if (accept('-')) {
        terms.push_back(make_neg(parse_term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : make_sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    std::vector<Expr> factors{acc};
    for (;;) {
      if (accept('*')) {
        factors.push_back(parse_factor());
      } else if (peek('/')) {
        ++pos_;
        Expr lhs = factors.size() == 1 ? factors.front() : make_product(factors);
        factors = {make_div(lhs, parse_factor())};
      } else {
        break;
      }
    }
    return factors.size() == 1 ? factors.front() : make_product(std::move(factors));
  }

  Expr parse_factor() {
    if (accept('-')) return make_neg(parse_factor());
    Expr b = parse_base();
    if (accept('^')) {
      std::size_t at = pos_;
      Rational p = parse_exponent();
      if (p.den() != 1 && p.den() != 2)
        fail(ParseErrorKind::Syntax, at, "exponent must be integer or half-integer");
      return make_pow(b, p);
    }
    return b;
  }

  std::int64_t parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail(ParseErrorKind::Syntax, start, "expected integer");
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) fail(ParseErrorKind::Syntax, start, "integer out of range");
    return v;
  }

  Rational parse_exponent() {
    bool paren = accept('(');
    bool neg = accept('-');
    std::int64_t num = parse_integer();
    std::int64_t den = 1;
    // A bare exponent is an integer: "x^3/6" divides by 6.
    if (paren && accept('/')) {
      std::size_t at = pos_;
      den = parse_integer();
      if (den == 0) fail(ParseErrorKind::Syntax, at, "zero denominator in exponent");
    }
    if (paren) expect(')');
    Rational r(num, den);
    return neg ? -r : r;
  }

  Expr parse_number() {
    std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_float = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        is_float = true;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit(text_.substr(start, pos_ - start));
    if (lit == ".") fail(ParseErrorKind::Syntax, start, "malformed number");
    if (!is_float) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
      if (ec == std::errc()) return constant(v);
    }
    return constant_raw_float(std::strtod(lit.c_str(), nullptr));
  }

  std::vector<Expr> parse_call_args() {
    std::vector<Expr> args;
    if (peek(')')) {
      ++pos_;
      return args;
    }
    args.push_back(parse_expr());
    while (accept(',')) args.push_back(parse_expr());
    expect(')');
    return args;
  }

  static bool lookup_func(std::string_view id, Func& f) {
    struct Entry {
      std::string_view name;
      Func f;
    };
    static constexpr Entry kFuncs[] = {{"sin", Func::Sin},   {"cos", Func::Cos},
                                       {"exp", Func::Exp},   {"ln", Func::Ln},
                                       {"sqrt", Func::Sqrt}, {"arctan", Func::Arctan}};
    for (const auto& e : kFuncs)
      if (e.name == id) {
        f = e.f;
        return true;
      }
    return false;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) fail(ParseErrorKind::Syntax, pos_, "unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      if (pos_ < text_.size() && text_[pos_] == '\'')
        fail(ParseErrorKind::Syntax, pos_,
             "primed names are not accepted; derivative order is internal");
      if (peek('(')) {
        std::size_t call_at = pos_;
        ++pos_;
        Func f{};
        bool builtin = lookup_func(id, f);
        bool opaque = !builtin && std::isupper(static_cast<unsigned char>(id[0]));
        if (!builtin && !opaque)
          fail(ParseErrorKind::UnknownIdentifier, start, "unknown function '" + id + "'");
        auto args = parse_call_args();
        if (args.size() != 1)
          fail(ParseErrorKind::Arity, call_at,
               "'" + id + "' takes 1 argument, got " + std::to_string(args.size()));
        return builtin ? make_func(f, args[0]) : make_opaque(id, args[0], 0);
      }
      if (id == "pi") return constant_raw_float(3.14159265358979323846);
      if (is_known_variable(id)) return variable(id);
      Func f;
      if (lookup_func(id, f) || std::isupper(static_cast<unsigned char>(id[0])))
        fail(ParseErrorKind::Arity, start, "'" + id + "' takes 1 argument, got 0");
      fail(ParseErrorKind::UnknownIdentifier, start, "unknown identifier '" + id + "'");
    }
    fail(ParseErrorKind::Syntax, pos_, std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

}  // namespace wavered
