// Prints the reduction invariants and case of every catalog ansatz, in the
// canonical frame and in a boosted one.

#include <cstdio>

#include "wavered/wavered.hpp"

using namespace wavered;

namespace {

void print_catalog(const Frame& frame, const char* label) {
  std::printf("== %s frame\n", label);
  for (const auto& entry : catalog(frame, "sin")) {
    const auto rr = compute_invariants(entry.spec);
    const auto c = classify_case(rr, entry.spec);
    const auto v = verify_reduction(entry.spec, rr, entry.equation);
    std::printf("%d. %s\n", entry.index, entry.description.c_str());
    const auto cs = entry.equation.coefficients();
    for (std::size_t i = 0; i < 5; ++i)
      std::printf("     %s = %-10s %s\n", kInvariantNames[i], to_string(*cs[i]).c_str(),
                  verdict_name(v.checks[i].result.verdict));
    std::printf("     case %s", case_name(c.kind));
    if (c.kind == CaseKind::Parabolic) std::printf(", lambda = %+d", c.lambda);
    std::printf("\n");
  }
}

}  // namespace

int main() {
  print_catalog(canonical_frame(), "canonical");
  SampleRng rng(7);
  print_catalog(random_lorentz(rng, 1.0)(canonical_frame()), "boosted");
  return 0;
}
