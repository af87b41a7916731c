#pragma once

// Property checks at pinned instances and tolerances, shared by the verify
// mode of the command-line tool and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "fracsob/mild_solver.hpp"

namespace fracsob {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Worst measured quantity and the limit it is compared against.
  double measured = 0.0;
  double limit = 0.0;
  double seconds = 0.0;
  std::string detail;
};

/// Reference instance: alpha = 4/5, q = 1/4, p = 2, a = 1, u0 = x(pi - x),
/// v0 = w_1, f = 0.1 sin(u_x), one nonlocal term 0.3 u(1/2).
ProblemSpec reference_problem(int modes, int steps);

CheckResult check_density_normalization();
CheckResult check_density_moments();
CheckResult check_half_order_density();
CheckResult check_operator_oracle();
CheckResult check_operator_bounds(std::uint64_t seed);
CheckResult check_fractional_identities();
CheckResult check_linear_solve();
CheckResult check_nonlinear_solve();
CheckResult check_exponent_reproduction();

/// Checks 1 through 9 in order.
std::vector<CheckResult> run_property_checks(std::uint64_t seed);

}  // namespace fracsob
