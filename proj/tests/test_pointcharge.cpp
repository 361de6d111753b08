#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigs/errors.hpp"
#include "bigs/pointcharge.hpp"

using namespace bigs;

TEST_CASE("integrand asymptotics") {
  // Near the source the density saturates: integrand -> r^2 (times 4 pi
  // handled outside); far away it decays like b^2 / (2 r^2).
  const double b = 1.0;
  for (double r : {1e-6, 1e-4, 1e-3}) {
    CHECK(pointChargeIntegrand(r, b) ==
          doctest::Approx(r * r).epsilon(1e-5));
  }
  for (double r : {1e3, 1e4, 1e5}) {
    CHECK(pointChargeIntegrand(r, b) ==
          doctest::Approx(b * b / (2 * r * r)).epsilon(1e-5));
  }
  // Cancellation-free at the crossover r = sqrt(b): the exact value there
  // is r^2 (1 - 1/sqrt(2)).
  const double rc = std::sqrt(b);
  CHECK(pointChargeIntegrand(rc, b) ==
        doctest::Approx(rc * rc * (1.0 - 1.0 / std::sqrt(2.0)))
            .epsilon(1e-13));
  CHECK(pointChargeIntegrand(0.0, b) == 0.0);
}

TEST_CASE("integrand scaling relation") {
  // r -> sqrt(b) r maps the b-integrand onto b times the unit one.
  for (double b : {0.5, 2.0, 7.0}) {
    for (double r : {0.3, 1.0, 4.0}) {
      CHECK(pointChargeIntegrand(std::sqrt(b) * r, b) ==
            doctest::Approx(b * pointChargeIntegrand(r, 1.0))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("energy converges under domain doubling") {
  const PointChargeResult sweep = pointChargeSweep(1.0);
  REQUIRE(sweep.table.size() >= 2);
  CHECK(sweep.doublingDelta <= 1e-8 * sweep.energy);
  CHECK(sweep.rMax == sweep.table.back().rMax);
  CHECK(sweep.energy == sweep.table.back().energy);
  for (std::size_t i = 1; i < sweep.table.size(); ++i) {
    CHECK(sweep.table[i].rMax ==
          doctest::Approx(2.0 * sweep.table[i - 1].rMax).epsilon(1e-15));
    // The tail contribution is positive: energy grows with the domain.
    CHECK(sweep.table[i].energy > sweep.table[i - 1].energy);
  }
  // Tail estimate: beyond R the remainder is ~ 4 pi b^2 / (2 R).
  const double tail = 4 * M_PI * 1.0 / (2 * sweep.rMax);
  CHECK(pointChargeEnergy(1.0, 2 * sweep.rMax) - sweep.energy <=
        2 * tail);
}

TEST_CASE("three-halves power scaling in the charge") {
  const double unit = pointChargeSweep(1.0).energy;
  for (double b : {0.5, 2.0}) {
    const PointChargeResult sweep = pointChargeSweep(b);
    CHECK(sweep.energy ==
          doctest::Approx(std::pow(b, 1.5) * unit).epsilon(1e-6));
  }
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(pointChargeEnergy(0.0, 10.0), PreconditionError);
  CHECK_THROWS_AS(pointChargeEnergy(-1.0, 10.0), PreconditionError);
  CHECK_THROWS_AS(pointChargeEnergy(1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(pointChargeSweep(-2.0), PreconditionError);
  // r <= 0 is the regular center, not an error.
  CHECK(pointChargeIntegrand(-1.0, 1.0) == 0.0);
}
