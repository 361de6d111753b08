#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bigs/pohozaev.hpp"

namespace bigs {

struct SolverConfig {
  Regime regime = Regime::ZeroMass;
  int dimension = 3;
  double exponent = 8.0;
  double gridRadius = 0.0;  // <= 0 picks a regime-dependent default
  Eigen::Index gridNodes = 4001;

  double interiorMargin = 1e-3;
  int maxIterations = 50000;
  double stepInitial = 0.5;
  double stepShrink = 0.5;
  double tolEnergyStall = 1e-10;
  int stallWindow = 20;
  double tolGradient = 1e-7;
  double tolPohozaev = 1e-6;
  double tolRoot = 1e-12;

  double initAmplitude = 0.0;  // <= 0 picks a default
  double initWidth = 0.0;      // <= 0 picks a default
  int multiStart = 1;
  std::uint64_t seed = 1;

  // Block-radial solves only: dimension must equal k1 + k2.
  int k1 = 0;
  int k2 = 0;

  void validate() const;
  double effectiveRadius() const;
  NonlinearitySpec makeSpec() const;
};

enum class SignClass { Positive, Negative, SignChanging };

const char* signClassName(SignClass sign);

struct GroundStateResult {
  explicit GroundStateResult(Profile p) : profile(std::move(p)) {}

  Profile profile;
  double energy = 0.0;
  double psiValue = 0.0;
  double pohozaevResidual = 0.0;
  double supGradient = 0.0;
  double projectedGradientNorm = 0.0;
  int iterations = 0;
  std::string termination;  // gradient | stall | max-iterations
  std::vector<double> thetaHistory;
  SignClass sign = SignClass::Positive;
  bool monotone = false;
  double tailRatio = 0.0;  // share of the membrane energy on r >= 0.9 R
  bool tailWarning = false;
  // Names of hypothesis checks the spec failed on the default sample set;
  // the solve proceeds anyway (warn-and-continue).
  std::vector<std::string> auditWarnings;
};

// Ground state by projected descent over the scaling manifold M(u) = 0:
// preconditioned gradient step, admissibility backtracking, projection by
// theta scaling and resampling, monotone in the manifold energy.
GroundStateResult minimize(const SolverConfig& config,
                           const NonlinearitySpec& spec);
GroundStateResult minimizeFrom(Profile start, const SolverConfig& config,
                               const NonlinearitySpec& spec);

struct DescentStep {
  Profile next;
  double energy = 0.0;
  double theta = 0.0;
  double step = 0.0;
  bool accepted = false;
};

// One descent + project step from u with initial trial step; backtracks
// until the candidate is admissible and the manifold energy does not
// increase beyond roundoff.
DescentStep descendAndProject(const Profile& u, const NonlinearitySpec& spec,
                              double step, const SolverConfig& config,
                              double referenceEnergy);

// (theta, I(u_theta)) along a scaling grid through a manifold point.
std::vector<std::pair<double, double>> pathScan(const Profile& u,
                                                const NonlinearitySpec& spec,
                                                const Eigen::ArrayXd& thetas);
Eigen::ArrayXd logThetaGrid(double lo, double hi, int count);

struct MultiStartReport {
  GroundStateResult best;
  std::vector<double> energies;
  double spread = 0.0;  // (max - min) / |best energy|
  int failures = 0;
  std::vector<std::string> failureMessages;
};

MultiStartReport multiStart(const SolverConfig& config,
                            const NonlinearitySpec& spec, int starts);

// Gaussian bump a (exp(-(r/width)^2) - exp(-(R/width)^2)), clamped to 0
// past R; the solver's default start.
Profile initialBump(const RadialGridPtr& grid, double amplitude, double width);

// Descent direction: the raw quadrature gradient solved against the
// linearized-operator metric (tridiagonal Hessian of Psi, plus the mass
// term in the positive-mass regime), which absorbs the grid stiffness;
// last entry zero.
Eigen::ArrayXd functionalGradient(const Profile& u,
                                  const NonlinearitySpec& spec, double margin);

}  // namespace bigs
