#pragma once

namespace superhedge {

/// Numerical thresholds shared by the LP kernel and everything built on it.
struct Tolerances {
  double feasibility = 1e-8;   // primal residuals, certificate checks
  double pivot = 1e-10;        // smallest admissible pivot magnitude
  double duality_gap = 1e-7;   // relative primal/dual objective agreement
  double optimality = 1e-9;    // reduced-cost sign threshold
  double positivity = 1e-9;    // "strictly positive" in gamma/epsilon tests
  int bland_after = 50;        // consecutive degenerate pivots before Bland
  int max_iterations = 200000;
  int restarts = 2;
};

inline const Tolerances &default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

} // namespace superhedge
