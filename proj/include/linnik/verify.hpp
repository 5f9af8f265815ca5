#pragma once

#include <string>
#include <vector>

namespace linnik::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

// Acceptance criteria, numbered as in the repository docs. Criterion 8 is
// long-run and skips unless LINNIK_LONG=1 (or force_long).
CheckResult criterion1_cross_algorithm(unsigned jobs);
CheckResult criterion2_beta1_is_rho();
CheckResult criterion3_kappa_identity();
CheckResult criterion4_constants();
CheckResult criterion5_inequality_sweeps();
CheckResult criterion6_c0_reproduction(unsigned jobs);
CheckResult criterion7_table2();
CheckResult criterion8_table1_spot(unsigned jobs, bool force_long = false);
CheckResult criterion9_determinism();

// Module-invariant suites used by `linnik verify` on top of the criteria.
std::vector<CheckResult> module_invariants(unsigned jobs);

std::vector<CheckResult> run_default(unsigned jobs);
std::vector<CheckResult> run_long(unsigned jobs);

}  // namespace linnik::verify
