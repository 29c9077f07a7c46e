#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rqs {

struct SelftestOptions {
  int trials = 100;         // random configurations per check
  int krylov_trials = 200;  // Krylov-vs-dense comparisons
  std::uint64_t seed = 20260808;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst observed value vs bound
};

//! Randomized invariant suite: unitarity, conjugation trace/positivity,
//! channel trace preservation and positivity, Krylov-vs-dense propagator
//! accuracy, and byte-identical seeded reruns.
std::vector<CheckResult> run_invariant_suite(const SelftestOptions& opts = {});

}  // namespace rqs
