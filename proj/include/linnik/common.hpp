#pragma once

#include <stdexcept>
#include <string>

namespace linnik {

inline constexpr const char* kVersion = "0.1.0";

// CLI exit codes. Library code throws; the harness maps exceptions to these.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitBudget = 3,
  kExitInternal = 4,
};

struct invalid_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration budgets, memory budgets and factoring range gates.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct cache_corrupt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace linnik
