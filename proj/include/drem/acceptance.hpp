#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dremix {

struct CriterionResult {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

/// Number of acceptance criteria.
inline constexpr int kCriterionCount = 14;

/// Run one criterion. config_dir holds the golden scenario files used by the
/// determinism and step-refinement check.
CriterionResult run_criterion(int id, const std::string& config_dir);

/// Run all criteria in order; on_result is called as each one finishes.
std::vector<CriterionResult> run_acceptance(const std::string& config_dir,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  title  (detail)" style line.
std::string format_result(const CriterionResult& r);

}  // namespace dremix
