#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace wavered {

/// Second-order jet: value, gradient and Hessian with respect to n active
/// variables. Hessian entries are computed on the upper triangle and mirrored,
/// so hess(i, j) == hess(j, i) holds bit for bit.
class Jet2 {
 public:
  explicit Jet2(std::size_t n = 0, double value = 0.0)
      : n_(n), v_(value), g_(n, 0.0), h_(n * n, 0.0) {}

  static Jet2 variable(std::size_t n, std::size_t index, double value) {
    Jet2 j(n, value);
    j.g_[index] = 1.0;
    return j;
  }

  std::size_t size() const { return n_; }
  double value() const { return v_; }
  double grad(std::size_t i) const { return g_[i]; }
  double hess(std::size_t i, std::size_t j) const { return h_[i * n_ + j]; }
  std::span<const double> gradient() const { return g_; }

  void set_value(double v) { v_ = v; }
  void set_grad(std::size_t i, double g) { g_[i] = g; }
  void set_hess(std::size_t i, std::size_t j, double h) {
    h_[i * n_ + j] = h;
    h_[j * n_ + i] = h;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    assert(a.n_ == b.n_);
    Jet2 r(a.n_, a.v_ + b.v_);
    for (std::size_t i = 0; i < a.n_; ++i) r.g_[i] = a.g_[i] + b.g_[i];
    for (std::size_t k = 0; k < a.h_.size(); ++k) r.h_[k] = a.h_[k] + b.h_[k];
    return r;
  }

  friend Jet2 operator-(const Jet2& a) {
    Jet2 r(a.n_, -a.v_);
    for (std::size_t i = 0; i < a.n_; ++i) r.g_[i] = -a.g_[i];
    for (std::size_t k = 0; k < a.h_.size(); ++k) r.h_[k] = -a.h_[k];
    return r;
  }

  friend Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    assert(a.n_ == b.n_);
    const std::size_t n = a.n_;
    Jet2 r(n, a.v_ * b.v_);
    for (std::size_t i = 0; i < n; ++i) r.g_[i] = a.v_ * b.g_[i] + b.v_ * a.g_[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        r.set_hess(i, j,
                   a.v_ * b.hess(i, j) + b.v_ * a.hess(i, j) + a.g_[i] * b.g_[j] +
                       b.g_[i] * a.g_[j]);
    return r;
  }

  friend Jet2 operator*(double s, const Jet2& a) {
    Jet2 r(a.n_, s * a.v_);
    for (std::size_t i = 0; i < a.n_; ++i) r.g_[i] = s * a.g_[i];
    for (std::size_t k = 0; k < a.h_.size(); ++k) r.h_[k] = s * a.h_[k];
    return r;
  }

  /// Chain rule for a scalar function f given f(a), f'(a), f''(a).
  friend Jet2 chain(const Jet2& a, double f, double df, double d2f) {
    const std::size_t n = a.n_;
    Jet2 r(n, f);
    for (std::size_t i = 0; i < n; ++i) r.g_[i] = df * a.g_[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        r.set_hess(i, j, df * a.hess(i, j) + d2f * a.g_[i] * a.g_[j]);
    return r;
  }

  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double inv = 1.0 / b.v_;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 private:
  std::size_t n_;
  double v_;
  std::vector<double> g_;
  std::vector<double> h_;
};

}  // namespace wavered
