#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pedcoal {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs the full acceptance suite (fixed seeds, pinned tolerances), streaming
// one PASS/FAIL line per criterion. `only` restricts to a single criterion id
// (0 = all).
std::vector<CriterionResult> run_acceptance(std::ostream& log, int threads, int only = 0);

inline bool all_passed(const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs)
    if (!r.passed) return false;
  return true;
}

}  // namespace pedcoal
