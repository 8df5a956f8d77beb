#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wavered/expr.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

/// Metric signature (+, -, -, -).
inline constexpr std::array<double, 4> kMetric{1.0, -1.0, -1.0, -1.0};

struct FourVector {
  std::array<double, 4> v{};

  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }

  friend FourVector operator+(const FourVector& a, const FourVector& b) {
    return {{a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}};
  }
  friend FourVector operator-(const FourVector& a, const FourVector& b) {
    return {{a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}};
  }
  friend FourVector operator*(double s, const FourVector& a) {
    return {{s * a[0], s * a[1], s * a[2], s * a[3]}};
  }
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

inline FourVector basis_vector(std::size_t mu) {
  FourVector e;
  e[mu] = 1.0;
  return e;
}

/// Minkowski product u0 v0 - u1 v1 - u2 v2 - u3 v3.
inline double mdot(const FourVector& u, const FourVector& v) {
  return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3];
}

enum class FrameSlot { A, B, C, D };

inline const char* slot_name(FrameSlot s) {
  switch (s) {
    case FrameSlot::A: return "a";
    case FrameSlot::B: return "b";
    case FrameSlot::C: return "c";
    case FrameSlot::D: return "d";
  }
  return "?";
}

/// Parameter vectors a, b, c, d: a timelike unit, b, c, d spacelike units,
/// all mutually orthogonal.
struct Frame {
  FourVector a, b, c, d;

  const FourVector& operator[](FrameSlot s) const {
    switch (s) {
      case FrameSlot::A: return a;
      case FrameSlot::B: return b;
      case FrameSlot::C: return c;
      default: return d;
    }
  }
};

inline Frame canonical_frame() {
  return {basis_vector(0), basis_vector(1), basis_vector(2), basis_vector(3)};
}

struct FrameViolation {
  std::string condition;
  double magnitude;
};

inline constexpr double kExactFrameTol = 1e-12;
inline constexpr double kNumericFrameTol = 1e-9;

/// Checks a^2 = 1, b^2 = c^2 = d^2 = -1 and the six orthogonality relations.
/// Pairs pointing along the same Euclidean direction are additionally
/// reported as duplicates. An empty result means the frame is valid.
inline std::vector<FrameViolation> validate_frame(const Frame& f,
                                                  double tol = kExactFrameTol) {
  std::vector<FrameViolation> out;
  const FrameSlot slots[] = {FrameSlot::A, FrameSlot::B, FrameSlot::C, FrameSlot::D};
  const double norms[] = {1.0, -1.0, -1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    const auto& u = f[slots[i]];
    double dev = std::fabs(mdot(u, u) - norms[i]);
    if (!(dev <= tol))
      out.push_back({std::string(slot_name(slots[i])) + slot_name(slots[i]) + " = " +
                         (i == 0 ? "1" : "-1"),
                     dev});
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const auto& u = f[slots[i]];
      const auto& v = f[slots[j]];
      double dev = std::fabs(mdot(u, v));
      std::string pair = std::string(slot_name(slots[i])) + slot_name(slots[j]);
      if (!(dev <= tol)) out.push_back({pair + " = 0", dev});
      // Euclidean collinearity: |u|^2 |v|^2 - (u.v)^2 vanishes.
      double uu = 0, vv = 0, uv = 0;
      for (int k = 0; k < 4; ++k) {
        uu += u[k] * u[k];
        vv += v[k] * v[k];
        uv += u[k] * v[k];
      }
      double gram = uu * vv - uv * uv;
      if (gram <= tol * std::max(1.0, uu * vv))
        out.push_back({"duplicate direction " + pair, std::sqrt(std::max(gram, 0.0))});
    }
  }
  return out;
}

/// The linear form a_mu x^mu = a0 x0 - a1 x1 - a2 x2 - a3 x3.
inline Expr project(const FourVector& a) {
  std::vector<Expr> terms;
  for (int mu = 0; mu < 4; ++mu) {
    double coef = kMetric[mu] * a[mu];
    if (coef == 0.0) continue;
    terms.push_back(constant_float(coef) * variable("x" + std::to_string(mu)));
  }
  return make_sum(std::move(terms));
}

inline Expr project(const Frame& f, FrameSlot which) { return project(f[which]); }

// ---------------------------------------------------------------------------
// Lorentz transformations
// ---------------------------------------------------------------------------

struct LorentzTransform {
  std::array<std::array<double, 4>, 4> m{};

  static LorentzTransform identity() {
    LorentzTransform t;
    for (int i = 0; i < 4; ++i) t.m[i][i] = 1.0;
    return t;
  }

  /// Boost with the given rapidity along a unit spatial direction n.
  static LorentzTransform boost(double rapidity, std::array<double, 3> n) {
    double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    for (auto& c : n) c /= norm;
    const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
    LorentzTransform t;
    t.m[0][0] = ch;
    for (int i = 0; i < 3; ++i) {
      t.m[0][i + 1] = sh * n[i];
      t.m[i + 1][0] = sh * n[i];
      for (int j = 0; j < 3; ++j)
        t.m[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + (ch - 1.0) * n[i] * n[j];
    }
    return t;
  }

  /// Spatial rotation about a unit axis (Rodrigues).
  static LorentzTransform rotation(std::array<double, 3> k, double angle) {
    double norm = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    for (auto& c : k) c /= norm;
    const double cs = std::cos(angle), sn = std::sin(angle);
    const double cross[3][3] = {{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}};
    LorentzTransform t;
    t.m[0][0] = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t.m[i + 1][j + 1] =
            (i == j ? cs : 0.0) + sn * cross[i][j] + (1.0 - cs) * k[i] * k[j];
    return t;
  }

  FourVector operator()(const FourVector& x) const {
    FourVector r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i] += m[i][j] * x[j];
    return r;
  }

  friend LorentzTransform operator*(const LorentzTransform& p, const LorentzTransform& q) {
    LorentzTransform r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) r.m[i][j] += p.m[i][k] * q.m[k][j];
    return r;
  }

  Frame operator()(const Frame& f) const { return {(*this)(f.a), (*this)(f.b), (*this)(f.c), (*this)(f.d)}; }
};

/// A random proper orthochronous transformation: rotation times boost with
/// rapidity in [-max_rapidity, max_rapidity].
inline LorentzTransform random_lorentz(SampleRng& rng, double max_rapidity = 1.0) {
  auto unit3 = [&rng] {
    for (;;) {
      std::array<double, 3> n{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      double r2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
      if (r2 > 1e-4 && r2 <= 1.0) return n;
    }
  };
  auto rot = LorentzTransform::rotation(unit3(), rng.uniform(0.0, 2.0 * M_PI));
  auto bst = LorentzTransform::boost(rng.uniform(-max_rapidity, max_rapidity), unit3());
  return rot * bst;
}

inline Frame random_frame(SampleRng& rng, double max_rapidity = 1.0) {
  return random_lorentz(rng, max_rapidity)(canonical_frame());
}

}  // namespace wavered
