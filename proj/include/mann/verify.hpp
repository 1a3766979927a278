#pragma once
// Runtime self-checks behind `mannctl verify`: structural properties of the
// model and oracle comparisons for the integrator and memory dynamics.

#include <string>
#include <vector>

namespace mann {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_verification();

}  // namespace mann
