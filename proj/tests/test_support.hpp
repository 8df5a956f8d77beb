#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavered/wavered.hpp"

namespace wavered::testing {

inline bool rel_close(double a, double b, double rtol) {
  return std::fabs(a - b) <= rtol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

/// Random smooth expression over x0..x3, free of singularities on all of R^4.
inline Expr random_smooth_expr(SampleRng& rng, int depth) {
  static const char* kVars[] = {"x0", "x1", "x2", "x3"};
  auto pick = [&](int n) { return static_cast<int>(rng.uniform(0.0, n - 1e-9)); };
  if (depth <= 0) {
    if (pick(4) == 0) return constant(static_cast<std::int64_t>(pick(5)) + 1);
    return variable(kVars[pick(4)]);
  }
  Expr a = random_smooth_expr(rng, depth - 1);
  switch (pick(9)) {
    case 0: return a + random_smooth_expr(rng, depth - 1);
    case 1: return a - random_smooth_expr(rng, depth - 1);
    case 2: return a * random_smooth_expr(rng, depth - 1);
    case 3: return sin(a);
    case 4: return cos(a);
    case 5: return exp(sin(a));
    case 6: return sqrt(constant(1) + a * a);
    case 7: return ln(constant(2) + cos(a));
    default: return arctan(a) / (constant(2) + sin(random_smooth_expr(rng, depth - 1)));
  }
}

}  // namespace wavered::testing
