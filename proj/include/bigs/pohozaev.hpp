#pragma once

#include <functional>

#include "bigs/radial.hpp"

namespace bigs {

struct ProjectionResult {
  double theta = 0.0;
  double energyAtTheta = 0.0;
  double residual = 0.0;  // |psi - integral H(theta u)| at the returned theta
  double bracketLow = 0.0;
  double bracketHigh = 0.0;
  int iterations = 0;
};

// Integral of H(theta u): amplitude scaling only, same quadrature as psi.
double targetH(const Profile& u, const NonlinearitySpec& spec, double theta);

// I(u_theta) = theta^N (Psi(u) - Phi(theta u)).
double scaledEnergy(const Profile& u, const NonlinearitySpec& spec,
                    double theta);

// M(u_theta) = theta^N (Psi(u) - integral of H(theta u)).
double scaledPohozaev(const Profile& u, const NonlinearitySpec& spec,
                      double theta);

// Unique theta with M(u_theta) = 0; factor-2 bracket expansion from theta=1,
// then bisection down to a relative bracket width of tolRoot.  In the
// positive-mass regime the root is the one on the increasing branch of
// theta -> integral H(theta u).
ProjectionResult thetaOf(const Profile& u, const NonlinearitySpec& spec,
                         double tolRoot = 1e-12);

// Scalar kernel shared with the block-radial path: solves
// integralHAt(theta) = psiValue for theta.
ProjectionResult solveProjectionTheta(
    double psiValue, const std::function<double(double)>& integralHAt,
    double tolRoot);

}  // namespace bigs
