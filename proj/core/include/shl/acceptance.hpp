#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shl/report.hpp"

namespace shl {

struct CriterionResult {
  int number = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< seconds; exceeding it fails the criterion
  std::vector<Report> reports;
};

/// Number of acceptance criteria (numbered from 1).
int acceptance_criterion_count();

/// Runs the selected criteria (all when `only` is empty) on a pool of `jobs`
/// worker threads. Results come back ordered by criterion number. When
/// output_dir is set every experiment Report is written there.
std::vector<CriterionResult> run_acceptance(int jobs, const std::vector<int>& only = {},
                                            const std::optional<std::filesystem::path>& output_dir = {});

/// One line: "[PASS] 4. title (1.23 s): detail".
std::string format_criterion(const CriterionResult& result);

/// Runs tasks[i]() for every i on `jobs` threads; exceptions are captured and
/// rethrown from the calling thread after all tasks finish.
void run_pool(const std::vector<std::function<void()>>& tasks, int jobs);

/// Randomized invariant suites (cases per property), seed fixed.
struct PropertyOutcome {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};
std::vector<PropertyOutcome> run_property_suites(int cases = 1000, unsigned long long seed = 20240611);

}  // namespace shl
