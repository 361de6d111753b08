#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigs/errors.hpp"
#include "bigs/optimizer.hpp"
#include "bigs/sobolev.hpp"

using namespace bigs;

namespace {

GroundStateResult deskGround() {
  SolverConfig config;
  config.regime = Regime::ZeroMass;
  config.dimension = 3;
  config.exponent = 8.0;
  config.gridNodes = 801;
  return minimize(config, config.makeSpec());
}

}  // namespace

TEST_CASE("best constant formula") {
  // ((N+p)/(Np)) N^{p/(N+p)} c0^{p/(N+p)} at N = 3, p = 8, c0 = 2.
  const double byHand =
      (11.0 / 24.0) * std::pow(3.0, 8.0 / 11.0) * std::pow(2.0, 8.0 / 11.0);
  CHECK(sobolevBestConstant(3, 8.0, 2.0) ==
        doctest::Approx(byHand).epsilon(1e-14));
  CHECK_THROWS_AS(sobolevBestConstant(3, 8.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(sobolevBestConstant(3, 8.0, -1.0), PreconditionError);
}

TEST_CASE("projected energy chain") {
  // powerProjectedEnergy must equal the scaled action at the closed-form
  // theta, and the ratio it induces must reproduce the best constant.
  const double psiValue = 2.3, L = 0.7;
  const int N = 3;
  const double p = 8.0;
  const double theta = powerThetaClosedForm(psiValue, L, N, p);
  const double projected = powerProjectedEnergy(psiValue, L, N, p);
  CHECK(projected ==
        doctest::Approx(std::pow(theta, N + p) * L / N).epsilon(1e-12));
  // Scaled action theta^N (psi - theta^p L / p) agrees on the manifold.
  const double action =
      std::pow(theta, N) * (psiValue - std::pow(theta, p) * L / p);
  CHECK(projected == doctest::Approx(action).epsilon(1e-12));
  // Monotone in psi at fixed L, decreasing in L at fixed psi.
  CHECK(powerProjectedEnergy(2 * psiValue, L, N, p) > projected);
  CHECK(powerProjectedEnergy(psiValue, 2 * L, N, p) < projected);
}

TEST_CASE("ground state attains the best constant") {
  const GroundStateResult ground = deskGround();
  const double constant = sobolevBestConstant(3, 8.0, ground.energy);
  const double ratio = sobolevRatio(ground.profile, 8.0);
  CHECK(std::abs(ratio - constant) <= 5e-3 * constant);
}

TEST_CASE("inequality holds on random trials") {
  const GroundStateResult ground = deskGround();
  const NonlinearitySpec spec = makePowerZeroMass(3, 8.0);
  const SobolevAudit audit =
      sobolevAudit(ground.profile, spec, ground.energy, 100, 424242);
  CHECK(audit.violations == 0);
  CHECK(audit.trials.size() == 100);
  CHECK(audit.groundMargin >= -5e-3 * audit.constant);
  CHECK(audit.minRatio >= audit.constant * (1.0 - 1e-6));
  for (const auto& trial : audit.trials) {
    CHECK(trial.ratio >= audit.constant * (1.0 - 1e-6));
    CHECK(trial.margin == doctest::Approx(trial.ratio - audit.constant)
                              .epsilon(1e-12));
  }
}

TEST_CASE("inflated constant fails at the ground state") {
  const GroundStateResult ground = deskGround();
  const NonlinearitySpec spec = makePowerZeroMass(3, 8.0);
  const SobolevAudit inflated =
      sobolevAudit(ground.profile, spec, ground.energy, 0, 1, 1.05);
  CHECK(inflated.groundMargin < 0.0);
  CHECK(inflated.constant ==
        doctest::Approx(1.05 * sobolevBestConstant(3, 8.0, ground.energy))
            .epsilon(1e-12));
}

TEST_CASE("random trial profiles are admissible and seeded") {
  const auto grid = makeRadialGrid(3, 6.0, 801);
  Rng rngA(7), rngB(7), rngC(8);
  const Profile a = randomBumpProfile(rngA, grid);
  const Profile b = randomBumpProfile(rngB, grid);
  const Profile c = randomBumpProfile(rngC, grid);
  CHECK(a.supGradient() <= 0.95 + 1e-12);
  CHECK(a.maxAbs() > 0.0);
  CHECK(a.values()[grid->size() - 1] == 0.0);
  CHECK((a.values() - b.values()).abs().maxCoeff() == 0.0);
  CHECK((a.values() - c.values()).abs().maxCoeff() > 0.0);
}

TEST_CASE("ratio is invariant under the manifold dilation") {
  // Both sides of the inequality carry theta^N, so u -> theta u(./theta)
  // leaves the ratio unchanged up to interpolation error.
  const auto grid = makeRadialGrid(3, 12.0, 8001);
  Eigen::ArrayXd v(grid->size());
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const double r = grid->nodes()[i];
    v[i] = 0.5 * std::exp(-(r - 1.0) * (r - 1.0) / 0.25);
  }
  v[grid->size() - 1] = 0.0;
  const Profile u(grid, std::move(v));
  REQUIRE(u.admissible(1e-3));
  const double base = sobolevRatio(u, 8.0);
  for (double theta : {0.5, 2.0}) {
    const Profile ut = resampleScaled(u, theta);
    CHECK(sobolevRatio(ut, 8.0) == doctest::Approx(base).epsilon(5e-4));
  }
}

TEST_CASE("proof algebra reproduces the ground level") {
  const GroundStateResult ground = deskGround();
  const double L =
      std::pow(lpNorm(ground.profile, 8.0), 8.0);
  const double reproduced =
      powerProjectedEnergy(psi(ground.profile), L, 3, 8.0);
  CHECK(std::abs(reproduced - ground.energy) <=
        1e-10 * std::max(1.0, ground.energy));
}

TEST_CASE("sobolev ratio is scale covariant in amplitude") {
  // Psi has no homogeneity, so the ratio genuinely depends on amplitude;
  // but for tiny profiles it approaches the H1-like regime where
  // Psi ~ |grad u|^2 / 2.  Sanity: ratio is positive and finite across
  // amplitudes.
  const auto grid = makeRadialGrid(3, 6.0, 801);
  Rng rng(3);
  const Profile u = randomBumpProfile(rng, grid);
  for (double lambda : {1e-3, 0.1, 1.0}) {
    const Profile lu(grid, lambda * u.values());
    const double ratio = sobolevRatio(lu, 8.0);
    CHECK(ratio > 0.0);
    CHECK(std::isfinite(ratio));
  }
  const Profile zero(grid, Eigen::ArrayXd::Zero(grid->size()));
  CHECK_THROWS_AS(sobolevRatio(zero, 8.0), DegenerateInputError);
}
