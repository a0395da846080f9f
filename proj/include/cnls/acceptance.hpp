#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cnls {

struct AcceptanceOptions {
  /// Multiplies every quadrature weight of the grids the suite builds.
  /// Anything other than 1 is a deliberate fault.
  double weight_factor = 1.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Runs the ten end-to-end criteria in order. A criterion fails when its
/// check fails or when it exceeds its runtime budget. `on_result` is called
/// after each one.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 sphere maximum vs brute force: ..." without timing, so the line
/// is reproducible.
std::string report_line(const CriterionResult& r);

}  // namespace cnls
