#pragma once

// Self-check suite behind `phbench validate`: dynamics against closed forms,
// structural identities, energy audits and balance residuals.

#include <string>
#include <vector>

namespace phbench {

struct CheckResult {
  std::string name;
  double value = 0.0;      // worst observed error
  double tolerance = 0.0;  // pass when value <= tolerance
  bool passed = false;
};

struct ValidationOptions {
  /// Test hook: perturbs one off-diagonal entry of every mass matrix the
  /// suite inspects, which a correct suite must flag.
  bool inject_mass_asymmetry = false;
  unsigned seed = 7;
};

std::vector<CheckResult> run_validation_suite(const ValidationOptions& options = {});

}  // namespace phbench
