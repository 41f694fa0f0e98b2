#pragma once

#include <string>
#include <vector>

namespace naesat {

struct CheckResult {
  std::string module;
  std::string identity;
  std::string inputs;
  double observed = 0;   // worst error seen
  double tolerance = 0;
  bool passed = false;
};

// Runs the identity and oracle checks of every module whose name contains filter
// (all modules when empty). Modules: instance, wp_tree, sp_core, onersb,
// firstmoment, gardner, tworsb.
std::vector<CheckResult> run_verify(const std::string& filter = "");

}  // namespace naesat
