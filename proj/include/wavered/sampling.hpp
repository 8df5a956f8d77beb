#pragma once

// Seeded sampling boxes and probabilistic identity testing. All "is this
// expression identically zero" questions in the library go through is_zero.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "wavered/eval.hpp"
#include "wavered/expr.hpp"

namespace wavered {

// ---------------------------------------------------------------------------
// Worker pool cap
// ---------------------------------------------------------------------------

namespace detail {
inline std::atomic<unsigned>& thread_limit_ref() {
  static std::atomic<unsigned> limit{1};
  return limit;
}
}  // namespace detail

inline void set_thread_limit(unsigned n) { detail::thread_limit_ref() = n == 0 ? 1 : n; }
inline unsigned thread_limit() { return detail::thread_limit_ref(); }

/// Runs fn(i) for i in [0, count). Work is split into contiguous chunks; the
/// caller merges per-index results in index order, so results do not depend
/// on the thread count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_limit(), count / 16 + 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(count, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// 64-bit Mersenne twister with a portable mapping to doubles (the standard
/// distributions are implementation defined).
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Sampling boxes
// ---------------------------------------------------------------------------

/// Axis-aligned box over named variables. Points where any exclusion
/// expression is within `tube` of zero (or cannot be evaluated) are rejected.
struct SamplingBox {
  std::vector<std::string> vars;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<Expr> exclude;
  double tube = 1e-3;

  std::size_t dim() const { return vars.size(); }

  static SamplingBox cube(std::vector<std::string> vars, double lo, double hi) {
    SamplingBox b;
    b.lo.assign(vars.size(), lo);
    b.hi.assign(vars.size(), hi);
    b.vars = std::move(vars);
    return b;
  }

  bool contains(const std::vector<double>& p) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  Binding bind(const std::vector<double>& p) const {
    Binding b;
    for (std::size_t i = 0; i < dim(); ++i) b.set(vars[i], p[i]);
    return b;
  }

  bool is_excluded(const Binding& b, const OpaqueTable& opaque) const {
    for (const auto& g : exclude) {
      try {
        if (std::fabs(evaluate(g, b, opaque)) < tube) return true;
      } catch (const DomainError&) {
        return true;
      }
    }
    return false;
  }

  std::vector<double> draw(SampleRng& rng) const {
    std::vector<double> p(dim());
    for (std::size_t i = 0; i < dim(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
    return p;
  }

  /// Draws until a non-excluded point is found; nullopt after max_tries.
  std::optional<std::vector<double>> draw_valid(SampleRng& rng, const OpaqueTable& opaque,
                                                std::size_t max_tries = 1000) const {
    for (std::size_t k = 0; k < max_tries; ++k) {
      auto p = draw(rng);
      if (!is_excluded(bind(p), opaque)) return p;
    }
    return std::nullopt;
  }
};

/// The default [-2, 2]^4 box over the coordinates x0..x3.
inline SamplingBox coordinate_box(double lo = -2.0, double hi = 2.0) {
  return SamplingBox::cube({"x0", "x1", "x2", "x3"}, lo, hi);
}

// ---------------------------------------------------------------------------
// Probabilistic zero test
// ---------------------------------------------------------------------------

enum class Verdict { Zero, Nonzero, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Zero: return "zero";
    case Verdict::Nonzero: return "nonzero";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

struct ZeroTestOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  /// Relative to max(1, largest subterm magnitude at the sample point).
  double atol = 1e-10;
  OpaqueTable opaque;
};

struct ZeroTestResult {
  Verdict verdict = Verdict::Undecided;
  std::vector<double> witness;  // in box variable order; set for Nonzero
  double witness_value = 0.0;
  std::size_t samples_used = 0;
  std::size_t domain_errors = 0;
  std::size_t excluded = 0;

  bool zero() const { return verdict == Verdict::Zero; }
};

inline ZeroTestResult is_zero(const Expr& e, const SamplingBox& box,
                              const ZeroTestOptions& opts = {}) {
  ZeroTestResult result;
  SampleRng rng(opts.seed);
  const std::size_t trials = std::max<std::size_t>(opts.trials, 1);
  const std::size_t max_attempts = trials * 10;
  std::size_t attempts = 0;

  struct Sample {
    bool ok = false;
    double value = 0.0;
    double scale = 0.0;
  };

  while (result.samples_used < trials && attempts < max_attempts) {
    const std::size_t want = std::min(trials - result.samples_used, max_attempts - attempts);
    std::vector<std::vector<double>> points;
    points.reserve(want);
    while (points.size() < want && attempts < max_attempts) {
      ++attempts;
      auto p = box.draw(rng);
      if (box.is_excluded(box.bind(p), opts.opaque)) {
        ++result.excluded;
        continue;
      }
      points.push_back(std::move(p));
    }
    std::vector<Sample> samples(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
      try {
        double scale = 0.0;
        samples[i].value = evaluate(e, box.bind(points[i]), opts.opaque, &scale);
        samples[i].scale = scale;
        samples[i].ok = true;
      } catch (const DomainError&) {
        samples[i].ok = false;
      }
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!samples[i].ok) {
        ++result.domain_errors;
        continue;
      }
      ++result.samples_used;
      const double bound = opts.atol * std::max(1.0, samples[i].scale);
      if (std::fabs(samples[i].value) > bound) {
        result.verdict = Verdict::Nonzero;
        result.witness = points[i];
        result.witness_value = samples[i].value;
        return result;
      }
    }
  }
  const std::size_t evaluated = result.samples_used + result.domain_errors;
  if (evaluated == 0 || result.samples_used == 0 ||
      static_cast<double>(result.domain_errors) > 0.9 * static_cast<double>(evaluated)) {
    result.verdict = Verdict::Undecided;
    return result;
  }
  result.verdict = Verdict::Zero;
  return result;
}

}  // namespace wavered
