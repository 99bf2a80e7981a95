#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "solitrain/simulation.hpp"

namespace solitrain::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct SelftestOptions {
  double dt = 5e-4;
  // Horizon of the conservation and oracle checks.
  double horizon = 10.0;
  GridSpec grid;
};

CheckResult check_conservation(const SelftestOptions& opt);
CheckResult check_dark_soliton(const SelftestOptions& opt);
CheckResult check_reduction(const SelftestOptions& opt);
CheckResult check_convergence(const SelftestOptions& opt);
CheckResult check_absorber(const SelftestOptions& opt);

// True iff each value is at most its predecessor (relative slack 1e-13).
bool norm_nonincreasing(const std::vector<double>& norms, std::size_t* first_violation = nullptr);

// Runs every check, prints one line each; returns true iff all pass.
bool run_selftest(const SelftestOptions& opt, std::ostream& os);

}  // namespace solitrain::cli
