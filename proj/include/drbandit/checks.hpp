#pragma once

#include <string>
#include <vector>

namespace drbandit {

/// Outcome of one self-verification criterion.
struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kNumChecks = 12;

/// Run one criterion (1-based id).
CheckResult run_check(int id);

/// Run a set of criteria (all of them when ids is empty) and print one
/// PASS/FAIL line per criterion to stdout. Returns true when all passed.
bool run_checks(const std::vector<int>& ids);

/// The ids of the checks that finish in a few seconds (used by `verify --quick`).
std::vector<int> quick_check_ids();

}  // namespace drbandit
