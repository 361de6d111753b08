#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigs/errors.hpp"
#include "bigs/lagrangian.hpp"

using namespace bigs;

TEST_CASE("W closed form against the defining expression") {
  for (double t : {0.0, 1e-9, 1e-4, 0.1, 0.5, 0.6, 0.9, 0.999}) {
    const double direct = 1.0 - std::sqrt(1.0 - t * t);
    CHECK(lagrangian::evalW(t) == doctest::Approx(direct).epsilon(1e-14));
  }
  CHECK(lagrangian::evalW(0.6) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("W is cancellation-free for tiny slopes") {
  // 1 - sqrt(1 - t^2) underflows to 0 in the naive form near t = 1e-9.
  const double t = 1e-9;
  CHECK(lagrangian::evalW(t) == doctest::Approx(0.5e-18).epsilon(1e-12));
}

TEST_CASE("flux density and its derivative") {
  CHECK(lagrangian::evalw(0.6) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lagrangian::evalwp(0.6) == doctest::Approx(1.953125).epsilon(1e-15));
  CHECK(lagrangian::evalw(0.0) == 0.0);
  CHECK(lagrangian::evalwp(0.0) == 1.0);
}

TEST_CASE("w and wp match finite differences of W at O(h^2)") {
  const double h = 1e-6;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double fdW =
        (lagrangian::evalW(t + h) - lagrangian::evalW(t - h)) / (2 * h);
    CHECK(lagrangian::evalw(t) == doctest::Approx(fdW).epsilon(1e-8));
    const double fdw =
        (lagrangian::evalw(t + h) - lagrangian::evalw(t - h)) / (2 * h);
    CHECK(lagrangian::evalwp(t) == doctest::Approx(fdw).epsilon(1e-7));
  }
}

TEST_CASE("series coefficients from the binomial expansion") {
  CHECK(lagrangian::seriesCoeff(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lagrangian::seriesCoeff(2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(lagrangian::seriesCoeff(3) == doctest::Approx(0.0625).epsilon(1e-15));
  // Independent oracle: b_j = |binom(1/2, j)| via the product form.
  for (int j = 1; j <= 50; ++j) {
    double b = 0.5;
    for (int i = 1; i < j; ++i) b *= (2.0 * i - 1.0) / (2.0 * i + 2.0);
    CHECK(lagrangian::seriesCoeff(j) == doctest::Approx(b).epsilon(1e-13));
    CHECK(lagrangian::seriesCoeff(j) > 0.0);
  }
  CHECK_THROWS_AS(lagrangian::seriesCoeff(0), DomainError);
}

TEST_CASE("series partial sums increase in K and converge to W") {
  for (double t : {0.2, 0.6, 0.9, 0.99}) {
    double prev = 0.0;
    for (int K = 1; K <= 60; ++K) {
      const double s = lagrangian::evalWSeries(t, K);
      CHECK(s >= prev);
      CHECK(s <= lagrangian::evalW(t) + 1e-15);
      prev = s;
    }
  }
  CHECK(std::abs(lagrangian::evalWSeries(0.6, 40) - lagrangian::evalW(0.6)) <
        1e-12);
  CHECK(lagrangian::evalWSeries(0.0, 5) == 0.0);
  CHECK(lagrangian::evalWSeries(0.6, 1) == doctest::Approx(0.18));
}

TEST_CASE("quadratic envelope t^2/2 <= W <= t^2") {
  for (int i = 0; i <= 1000; ++i) {
    const double t = i * (1.0 - 1e-6) / 1000.0;
    const double W = lagrangian::evalW(t);
    CHECK(W >= 0.5 * t * t - 1e-16);
    CHECK(W <= t * t + 1e-16);
  }
}

TEST_CASE("domain guards reject slopes at or past 1 on both sides") {
  CHECK_THROWS_AS(lagrangian::evalW(1.0), DomainError);
  CHECK_THROWS_AS(lagrangian::evalW(-1.0), DomainError);
  CHECK_THROWS_AS(lagrangian::evalw(1.2), DomainError);
  CHECK_THROWS_AS(lagrangian::evalwp(-1.2), DomainError);
  CHECK_THROWS_AS(lagrangian::evalWSeries(1.0, 5), DomainError);
}

TEST_CASE("parity: W and w' even, w odd") {
  for (double t : {0.1, 0.35, 0.8, 0.99}) {
    CHECK(lagrangian::evalW(-t) == lagrangian::evalW(t));
    CHECK(lagrangian::evalw(-t) == -lagrangian::evalw(t));
    CHECK(lagrangian::evalwp(-t) == lagrangian::evalwp(t));
  }
}

TEST_CASE("densityW agrees with evalW on arrays") {
  Eigen::ArrayXd t(5);
  t << 0.0, 0.1, 0.4, 0.7, 0.95;
  const Eigen::ArrayXd W = lagrangian::densityW(t.square());
  for (int i = 0; i < t.size(); ++i) {
    CHECK(W[i] == doctest::Approx(lagrangian::evalW(t[i])).epsilon(1e-15));
  }
}
