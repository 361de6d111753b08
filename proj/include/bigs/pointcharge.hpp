#pragma once

#include <vector>

namespace bigs {

// Energy of the electrostatic profile with a unit point source:
//   E(b, rMax) = 4 pi int_0^rMax (1 - r^2 / sqrt(r^4 + b^2)) r^2 dr.
// The integrand decays like b^2 / (2 r^2); the tail is integrated in the
// substituted variable t = 1/r so rMax may be very large at no extra cost.
double pointChargeEnergy(double b, double rMax, double tol = 1e-12);

// Integrand above, evaluated cancellation-free on both sides of r ~ sqrt(b).
double pointChargeIntegrand(double r, double b);

struct DoublingRow {
  double rMax = 0.0;
  double energy = 0.0;
};

struct PointChargeResult {
  double b = 0.0;
  double energy = 0.0;        // value at the last (largest) rMax
  double rMax = 0.0;          // last rMax reached
  std::vector<DoublingRow> table;
  double doublingDelta = 0.0; // |E(last) - E(previous)|
};

// Evaluate E(b, R), E(b, 2R), ... until the increment falls below
// tolDoubling relative to E, or maxDoublings is exhausted.  E(b) =
// b^(3/2) E(1) by the scaling r -> sqrt(b) r, which the tests pin against
// this sweep.
PointChargeResult pointChargeSweep(double b, double rMax0 = 10.0,
                                   double tolDoubling = 1e-8,
                                   int maxDoublings = 60,
                                   double tol = 1e-12);

}  // namespace bigs
