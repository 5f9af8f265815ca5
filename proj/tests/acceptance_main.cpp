// Acceptance suite: one numbered criterion per invocation (or --all).
// Prints one [PASS]/[FAIL]/[SKIP] line per criterion and exits nonzero on
// any failure.
#include <cstring>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "linnik/verify.hpp"

namespace {

using linnik::verify::CheckResult;

CheckResult run_criterion(int n, unsigned jobs) {
  using namespace linnik::verify;
  switch (n) {
    case 1:
      return criterion1_cross_algorithm(jobs);
    case 2:
      return criterion2_beta1_is_rho();
    case 3:
      return criterion3_kappa_identity();
    case 4:
      return criterion4_constants();
    case 5:
      return criterion5_inequality_sweeps();
    case 6:
      return criterion6_c0_reproduction(jobs);
    case 7:
      return criterion7_table2();
    case 8:
      return criterion8_table1_spot(jobs);
    case 9:
      return criterion9_determinism();
    default:
      return {"criterion " + std::to_string(n), false, false,
              "unknown criterion number", 0.0};
  }
}

void print(const CheckResult& r) {
  const char* tag = r.skipped ? "[SKIP]" : (r.pass ? "[PASS]" : "[FAIL]");
  std::cout << tag << " " << r.name << " (" << r.seconds << " s)\n";
  if (!r.detail.empty()) std::cout << "       " << r.detail << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> which;
  for (int i = 1; i < argc; i++) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--all") == 0) {
      for (int c = 1; c <= 9; c++) which.push_back(c);
    }
  }
  if (which.empty())
    for (int c = 1; c <= 9; c++) which.push_back(c);

  bool all_ok = true;
  for (int c : which) {
    CheckResult r;
    try {
      r = run_criterion(c, jobs);
    } catch (const std::exception& e) {
      r = {"criterion " + std::to_string(c), false, false,
           std::string("exception: ") + e.what(), 0.0};
    }
    print(r);
    all_ok = all_ok && (r.pass || r.skipped);
  }
  return all_ok ? 0 : 1;
}
