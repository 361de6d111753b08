#pragma once

#include <string>

#include "bigs/radial.hpp"

namespace bigs {

enum class ShotClass {
  CrossesZero,                  // overshoot: u hits zero at finite radius
  StaysPositiveUnboundedSlope,  // undershoot: |u'| runs into the guard or u grows
  Decays                        // follows the separatrix down to the threshold
};

const char* shotClassName(ShotClass c);

struct ShootResult {
  double initialHeight = 0.0;
  Profile profile;  // nodal trace, zero past the stop radius
  ShotClass classification = ShotClass::Decays;
  double terminalValue = 0.0;
  double stopRadius = 0.0;
  double energy = 0.0;
  double pohozaevResidual = 0.0;
  double psiValue = 0.0;
};

// w^{-1}(v) = v / sqrt(1 + v^2): slope from the flux variable.
double fluxInverse(double v);

// Integrate the radial field equation from u(0) = s0, u'(0) = 0 in the
// (u, v = w(u')) variables, which are regular through |u'| -> 1.  RK4 with
// substeps that land on the grid nodes; the first substep is a 2-term
// Taylor expansion to clear the r = 0 coordinate singularity.
ShootResult integrate(double s0, const NonlinearitySpec& spec,
                      const RadialGridPtr& grid, double stepTarget = 0.0);

// Bisect the initial height between a crossing and a non-crossing shot,
// returning the first trace that decays.  The bracket is refined down to
// machine precision if needed: a height error delta only leaves the
// separatrix at radius ~ log(1/delta), so decaying traces require a far
// tighter bracket than any fixed height tolerance.
ShootResult findGround(const NonlinearitySpec& spec, const RadialGridPtr& grid,
                       double sLo, double sHi, double stepTarget = 0.0);

}  // namespace bigs
