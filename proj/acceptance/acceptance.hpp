#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace imopt::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  int benchmark_seeds = 5;       // seeds 1..N of the default benchmark
  std::string scratch_directory; // for the byte-comparison runs; empty -> system temp
};

/// Runs the nine deterministic acceptance checks in order, reporting each
/// result through `on_result` as soon as it is known.
std::vector<CriterionResult> run_all(const Options& options,
                                     const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [n] title: detail (1.23 s)" or the same with FAIL.
std::string format(const CriterionResult& result);

}  // namespace imopt::acceptance
