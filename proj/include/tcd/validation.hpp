#pragma once

#include <string>
#include <vector>

namespace tcd::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured figures
  double seconds = 0.0;
};

// The built-in verification suite: closed-form reproductions, visibility
// laws, operator invariants, the brute-force partial-trace oracle and the
// Monte Carlo cross-checks.  Each check pins its own parameters and
// tolerances.
std::vector<CheckResult> run_all();

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace tcd::validation
