#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cramer {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

// Runs the twelve acceptance checks in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// "[PASS] 3 name: detail"
std::string format_result(const CriterionResult& r);

}  // namespace cramer
