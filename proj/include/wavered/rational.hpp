#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wavered {

struct RationalOverflow : std::overflow_error {
  RationalOverflow() : std::overflow_error("rational constant overflow") {}
};

// 128-bit intermediates for overflow-free products of 64-bit parts.
__extension__ typedef __int128 wide_int;

/// Exact rational number with 64-bit numerator and positive denominator,
/// always stored in lowest terms. Arithmetic throws RationalOverflow instead
/// of wrapping.
class Rational {
 public:
  constexpr Rational() = default;

  Rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    normalize(static_cast<wide_int>(num), static_cast<wide_int>(den));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    wide_int n = static_cast<wide_int>(a.num_) * b.den_ +
                 static_cast<wide_int>(b.num_) * a.den_;
    wide_int d = static_cast<wide_int>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a) {
    if (a.num_ == INT64_MIN) throw RationalOverflow();
    Rational r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<wide_int>(a.num_) * b.num_,
                     static_cast<wide_int>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_wide(static_cast<wide_int>(a.num_) * b.den_,
                     static_cast<wide_int>(a.den_) * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) = default;

  /// a^k for integer k; throws on 0^negative.
  static Rational pow(Rational base, std::int64_t k) {
    if (k < 0) {
      if (base.is_zero()) throw std::domain_error("zero to negative power");
      base = Rational(1) / base;
      k = -k;
    }
    Rational result(1);
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k > 0) base = base * base;
    }
    return result;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational from_wide(wide_int n, wide_int d) {
    Rational r;
    r.normalize(n, d);
    return r;
  }

  static wide_int gcd_wide(wide_int a, wide_int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      wide_int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize(wide_int n, wide_int d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    wide_int g = gcd_wide(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw RationalOverflow();
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace wavered
