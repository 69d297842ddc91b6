#pragma once

#include <string>

#include <json.hpp>

#include "losscape/errors.h"
#include "losscape/formula.h"
#include "losscape/optimize.h"

namespace losscape::cli {

inline constexpr int kSchemaVersion = 1;

struct AnalyzeOptions {
  bool skip_homology = false;
  bool verify_smith = false;
  Limits limits;
};

// Structural analysis of a satisfiable formula. Throws Unsatisfiable,
// LimitExceeded or PrimeImplicantOverflow.
nlohmann::json analysis_report(const Formula& f, const AnalyzeOptions& opts,
                               double parse_ms = 0.0);

// Conjunction of literals in variable order, "1" for the empty assignment.
std::string literal_string(const Formula& f, const PartialAssignment& pa);

nlohmann::json experiment_report_json(const ExperimentReport& report);

nlohmann::json error_json(const std::exception& e);

}  // namespace losscape::cli
