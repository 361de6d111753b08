#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bigs/errors.hpp"
#include "bigs/optimizer.hpp"

using namespace bigs;

namespace {

SolverConfig deskZeroMass() {
  SolverConfig c;
  c.regime = Regime::ZeroMass;
  c.dimension = 3;
  c.exponent = 8.0;
  c.gridNodes = 801;
  return c;
}

SolverConfig deskPositiveMass() {
  SolverConfig c;
  c.regime = Regime::PositiveMass;
  c.dimension = 2;
  c.exponent = 4.0;
  c.gridRadius = 25.0;
  c.gridNodes = 801;
  return c;
}

void checkGroundState(const GroundStateResult& r,
                      const NonlinearitySpec& spec, double tolPohozaev) {
  CHECK(r.supGradient < 1.0);
  CHECK(std::abs(r.pohozaevResidual) <=
        tolPohozaev * std::max(1.0, r.psiValue));
  CHECK(r.sign == SignClass::Positive);
  CHECK(r.monotone);
  const Eigen::Index n = r.profile.grid().size();
  CHECK(r.profile.values().head(n - 1).minCoeff() > 0.0);
  CHECK(r.profile.values()[n - 1] == 0.0);
  // On the manifold the action equals (1/N) integral of f(u) u.
  const double fu = phiPrimeU(r.profile, spec) / spec.dimension;
  CHECK(std::abs(r.energy - fu) <= 1e-6 * std::max(1.0, std::abs(r.energy)));
}

}  // namespace

TEST_CASE("zero-mass desk solve") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult r = minimize(config, spec);
  checkGroundState(r, spec, config.tolPohozaev);
  CHECK(r.termination == "gradient");
  CHECK(r.projectedGradientNorm <= config.tolGradient);
  CHECK(r.auditWarnings.empty());
  CHECK_FALSE(r.tailWarning);
  // Pinned desk-scale level: deterministic seed, deterministic arithmetic.
  CHECK(r.energy == doctest::Approx(4.8926253540294).epsilon(1e-10));
}

TEST_CASE("positive-mass desk solve") {
  const SolverConfig config = deskPositiveMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult r = minimize(config, spec);
  checkGroundState(r, spec, config.tolPohozaev);
  CHECK(r.energy == doctest::Approx(7.396364250188677).epsilon(1e-10));
}

TEST_CASE("negative start converges to the mirrored state") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult pos = minimize(config, spec);
  auto grid = makeRadialGrid(3, config.effectiveRadius(), config.gridNodes);
  const GroundStateResult neg = minimizeFrom(
      initialBump(grid, -0.5, config.effectiveRadius() / 6.0), config, spec);
  CHECK(neg.sign == SignClass::Negative);
  // f is odd, so the two signs are exactly energy-degenerate.
  CHECK(neg.energy == doctest::Approx(pos.energy).epsilon(1e-8));
}

TEST_CASE("inadmissible start is rescaled, not rejected") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  auto grid = makeRadialGrid(3, config.effectiveRadius(), config.gridNodes);
  // Steep bump: sup |du| well above 1.
  const Profile steep = initialBump(grid, 3.0, 1.0);
  CHECK_FALSE(steep.admissible());
  const GroundStateResult r = minimizeFrom(steep, config, spec);
  CHECK(r.energy == doctest::Approx(4.8926253540294).epsilon(1e-8));
}

TEST_CASE("multi-start agrees with the single solve") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult single = minimize(config, spec);
  const MultiStartReport one = multiStart(config, spec, 1);
  CHECK(one.energies.size() == 1);
  CHECK(one.failures == 0);
  // Different start, same level: convergence is far below the spread gate.
  CHECK(one.best.energy == doctest::Approx(single.energy).epsilon(1e-12));

  const MultiStartReport many = multiStart(config, spec, 3);
  CHECK(many.energies.size() == 3);
  CHECK(many.failures == 0);
  CHECK(many.spread <= 1e-8);
  CHECK_THROWS_AS(multiStart(config, spec, 0), ConfigurationError);
}

TEST_CASE("path scan peaks at the solution") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult r = minimize(config, spec);
  const Eigen::ArrayXd thetas = logThetaGrid(0.1, 10.0, 101);
  const auto scan = pathScan(r.profile, spec, thetas);
  REQUIRE(scan.size() == 101);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (scan[i].second > scan[argmax].second) argmax = i;
  }
  std::size_t nearestOne = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (std::abs(std::log(scan[i].first)) <
        std::abs(std::log(scan[nearestOne].first))) {
      nearestOne = i;
    }
  }
  CHECK(argmax == nearestOne);
  CHECK(scan[argmax].second <= r.energy + 1e-9 * std::abs(r.energy));
  CHECK(scan[argmax].second >= 0.99 * r.energy);
  CHECK(scan.back().second < 0.0);
}

TEST_CASE("path scan guards") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  auto grid = makeRadialGrid(3, config.effectiveRadius(), config.gridNodes);
  const Profile bump = initialBump(grid, 0.5, config.effectiveRadius() / 6.0);
  CHECK_THROWS_AS(pathScan(bump, spec, logThetaGrid(0.1, 10.0, 11)),
                  PreconditionError);  // not on the manifold
  const GroundStateResult r = minimize(config, spec);
  CHECK_THROWS_AS(pathScan(r.profile, spec, logThetaGrid(2.0, 3.0, 11)),
                  ConfigurationError);  // grid does not bracket 1
  Eigen::ArrayXd single(1);
  single[0] = 1.0;
  CHECK_THROWS_AS(pathScan(r.profile, spec, single), ConfigurationError);
}

TEST_CASE("log theta grid") {
  const Eigen::ArrayXd g = logThetaGrid(0.1, 10.0, 101);
  REQUIRE(g.size() == 101);
  CHECK(g[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g[100] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(g[50] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 1; i < 101; ++i) {
    CHECK(g[i] > g[i - 1]);
    // Log spacing: constant ratio.
    if (i >= 2) {
      CHECK(g[i] / g[i - 1] ==
            doctest::Approx(g[i - 1] / g[i - 2]).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(logThetaGrid(-1.0, 10.0, 5), ConfigurationError);
  CHECK_THROWS_AS(logThetaGrid(1.0, 0.5, 5), ConfigurationError);
  CHECK_THROWS_AS(logThetaGrid(0.1, 10.0, 1), ConfigurationError);
}

TEST_CASE("single descent step never raises the manifold energy") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  const GroundStateResult r = minimize(config, spec);
  const DescentStep step =
      descendAndProject(r.profile, spec, 0.5, config, r.energy);
  CHECK(step.accepted);
  CHECK(step.energy <= r.energy + 1e-10 * std::max(1.0, std::abs(r.energy)));
  CHECK(step.theta > 0.0);
}

TEST_CASE("solver guards") {
  const SolverConfig config = deskZeroMass();
  const NonlinearitySpec spec = config.makeSpec();
  auto grid = makeRadialGrid(3, 5.0, 101);
  CHECK_THROWS_AS(
      minimizeFrom(Profile(grid, Eigen::ArrayXd::Zero(101)), config, spec),
      DegenerateInputError);
  const NonlinearitySpec wrongDim = makePowerZeroMass(4, 8.0);
  CHECK_THROWS_AS(
      minimizeFrom(initialBump(grid, 0.5, 1.0), config, wrongDim),
      PreconditionError);

  SolverConfig bad = config;
  bad.dimension = 2;  // zero-mass needs N >= 3
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
  bad = config;
  bad.gridNodes = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
  bad = config;
  bad.stepShrink = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
  bad = config;
  bad.k1 = 2;
  bad.k2 = 2;  // dimension 3 != k1 + k2
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);

  CHECK_THROWS_AS(initialBump(grid, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(initialBump(grid, 0.5, 0.0), PreconditionError);
}

TEST_CASE("failed hypothesis checks warn but do not abort") {
  SolverConfig config = deskZeroMass();
  config.gridNodes = 201;
  config.maxIterations = 15;
  const NonlinearitySpec spec = makeLogZeroMass(3, 4);
  const GroundStateResult r = minimize(config, spec);
  REQUIRE(r.auditWarnings.size() == 1);
  CHECK(r.auditWarnings[0] == "F-dominated-by-fs");
  CHECK(r.iterations <= 15);
  CHECK(std::isfinite(r.energy));
}
