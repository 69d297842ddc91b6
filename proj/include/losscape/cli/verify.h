#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "losscape/formula.h"

namespace losscape::cli {

// Random satisfiable formula over x0..x{n-1}, n uniform in [1, max_n]: a DNF
// or an NNF tree of depth at most 4. Unsatisfiable draws are rejected.
Formula random_formula(std::mt19937_64& rng, int max_n);

struct VerifyOptions {
  int max_n = 6;
  int cases = 200;
  std::uint64_t seed = 1;
  // Test-only: corrupts the possibility suite's membership check.
  bool inject_bug = false;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::vector<std::string> counterexamples;  // at most a few
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  int failures() const;
};

// Suites: possibility, conditioning, minima, convexity, connectivity,
// boundary, gradients.
VerifyReport run_verify(const VerifyOptions& opts);
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);
std::vector<std::string> suite_names();

}  // namespace losscape::cli
