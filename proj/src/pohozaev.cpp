#include "bigs/pohozaev.hpp"

#include <cmath>
#include <string>

#include "bigs/errors.hpp"

namespace bigs {

namespace {

constexpr double kThetaGuardHigh = 1e12;
constexpr double kThetaGuardLow = 1e-12;

double amplitudeIntegral(const Profile& u,
                         const std::function<double(double)>& density,
                         double theta) {
  const Eigen::ArrayXd& v = u.values();
  const Eigen::ArrayXd& w = u.grid().nodeWeights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    sum += w[i] * density(theta * v[i]);
  }
  return u.grid().sphereArea() * sum;
}

}  // namespace

double targetH(const Profile& u, const NonlinearitySpec& spec, double theta) {
  return amplitudeIntegral(u, spec.H, theta);
}

double scaledEnergy(const Profile& u, const NonlinearitySpec& spec,
                    double theta) {
  const double psiU = psi(u);
  const double phiTheta = amplitudeIntegral(u, spec.F, theta);
  return std::pow(theta, spec.dimension) * (psiU - phiTheta);
}

double scaledPohozaev(const Profile& u, const NonlinearitySpec& spec,
                      double theta) {
  const double psiU = psi(u);
  return std::pow(theta, spec.dimension) *
         (psiU - targetH(u, spec, theta));
}

ProjectionResult solveProjectionTheta(
    double psiValue, const std::function<double(double)>& integralHAt,
    double tolRoot) {
  if (!(psiValue > 0.0)) {
    throw DegenerateInputError(
        "projection: psi must be positive, got " + std::to_string(psiValue));
  }
  if (!(tolRoot > 0.0)) {
    throw PreconditionError("projection: tolRoot must be positive");
  }
  // The predicate [integral H(theta u) >= psi] is monotone in theta in both
  // regimes: zero-mass by monotone growth of H along rays, positive-mass
  // because the scaled integral is negative below its unique zero and
  // increasing past it.
  auto above = [&](double theta) { return integralHAt(theta) >= psiValue; };
  int iterations = 0;
  double hi = 1.0;
  while (!above(hi)) {
    hi *= 2.0;
    ++iterations;
    if (hi > kThetaGuardHigh) {
      throw NoRootError(
          "projection: no scaling reaches the manifold below theta = 1e12");
    }
  }
  double lo = hi > 1.0 ? hi / 2.0 : 1.0;
  while (above(lo)) {
    lo /= 2.0;
    ++iterations;
    if (lo < kThetaGuardLow) {
      throw NoRootError(
          "projection: manifold crossing persists down to theta = 1e-12");
    }
  }
  ProjectionResult out;
  out.bracketLow = lo;
  out.bracketHigh = hi;
  while (hi - lo > tolRoot * hi) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++iterations;
    if (iterations > 4096) {
      throw NumericalFailure("projection: bisection failed to converge");
    }
  }
  out.theta = 0.5 * (lo + hi);
  out.residual = std::abs(psiValue - integralHAt(out.theta));
  out.iterations = iterations;
  return out;
}

ProjectionResult thetaOf(const Profile& u, const NonlinearitySpec& spec,
                         double tolRoot) {
  if (u.maxAbs() == 0.0) {
    throw DegenerateInputError("thetaOf: profile is identically zero");
  }
  const double psiU = psi(u);
  auto integralHAt = [&](double theta) { return targetH(u, spec, theta); };
  ProjectionResult out = solveProjectionTheta(psiU, integralHAt, tolRoot);
  out.energyAtTheta = scaledEnergy(u, spec, out.theta);
  return out;
}

}  // namespace bigs
