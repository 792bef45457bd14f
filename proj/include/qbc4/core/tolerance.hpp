#pragma once

namespace qbc4 {

/// Numerical thresholds shared by every module. Callers may pass their own
/// instance to any operation that accepts one.
struct Tolerances {
  double structural = 1e-10;   // unitarity, orthonormality, validity checks
  double equality = 1e-12;     // exact-identity assertions
  double convergence = 1e-9;   // optimizer stopping criterion
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qbc4
