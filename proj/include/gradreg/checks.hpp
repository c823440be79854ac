#pragma once

#include <cstdint>
#include <string>

namespace gradreg {

struct CheckResult {
  bool passed = false;
  double worst = 0.0;  // worst relative error seen
  int trials = 0;
  std::string detail;
};

/// Prop. 4.1: on random linear-MSE instances (n, d <= 10), the
/// finite-difference regularizer gradient is independent of eps and equals
/// both the HVP route and the closed form X^T X X^T (X theta - y).
CheckResult check_linear_invariance(int trials = 20, std::uint64_t seed = 20262026ull);

/// Theorem 5.1: across random sign-flip configurations (1-D and d=10
/// quadratics plus DLN instances), two flooding steps equal
/// theta - eta (grad L(theta + eta grad L) - grad L), and the mirrored
/// backward identity for the descent-then-ascent case.
CheckResult check_flooding_identity(int cases = 100, std::uint64_t seed = 31337ull);

/// Unnormalized SAM step vs GD with ForwardFD(eps = rho), gamma = rho,
/// componentwise to 1e-15 relative.
CheckResult check_sam_identity(int states = 100, std::uint64_t seed = 777ull);

}  // namespace gradreg
