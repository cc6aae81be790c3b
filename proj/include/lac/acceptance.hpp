#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lac::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every acceptance criterion in order; `on_result` sees each result as
/// soon as it is available.
std::vector<CriterionResult> run_all(
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace lac::acceptance
