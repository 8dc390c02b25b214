#pragma once

#include <string>
#include <vector>

namespace central_approx {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

inline constexpr int kLibraryCriteria = 10;

/// Runs criterion `id` (1..10) and checks its wall-clock limit.
CriterionResult run_criterion(int id);

/// Criteria 1..10 in order.
std::vector<CriterionResult> run_acceptance();

}  // namespace central_approx
