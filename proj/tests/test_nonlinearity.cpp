#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bigs/errors.hpp"
#include "bigs/nonlinearity.hpp"

using namespace bigs;

TEST_CASE("zero-mass power law closed forms") {
  const NonlinearitySpec spec = makePowerZeroMass(3, 8.0);
  CHECK(spec.regime == Regime::ZeroMass);
  CHECK(spec.f(0.0) == 0.0);
  CHECK(spec.F(0.0) == 0.0);
  CHECK(spec.f(2.0) == doctest::Approx(128.0).epsilon(1e-15));   // |2|^6 * 2
  CHECK(spec.f(-2.0) == doctest::Approx(-128.0).epsilon(1e-15));
  // H(s) = (1/p + 1/N)|s|^p = (11/24)|s|^8
  CHECK(spec.H(2.0) == doctest::Approx(11.0 / 24.0 * 256.0).epsilon(1e-14));
  CHECK(spec.H(-1.5) == doctest::Approx(11.0 / 24.0 * std::pow(1.5, 8)));

  const NonlinearitySpec n4 = makePowerZeroMass(4, 5.0);
  CHECK(n4.H(1.0) == doctest::Approx(9.0 / 20.0).epsilon(1e-14));
}

TEST_CASE("zero-mass power law rejects subcritical exponents") {
  CHECK_THROWS_AS(makePowerZeroMass(3, 6.0), PreconditionError);  // p = 2N/(N-2)
  CHECK_THROWS_AS(makePowerZeroMass(3, 4.0), PreconditionError);
  CHECK_THROWS_AS(makePowerZeroMass(2, 8.0), PreconditionError);  // N < 3
  CHECK_NOTHROW(makePowerZeroMass(3, 6.0 + 1e-9));
}

TEST_CASE("positive-mass power law closed forms") {
  const NonlinearitySpec spec = makePowerPositiveMass(2, 4.0);
  CHECK(spec.regime == Regime::PositiveMass);
  CHECK(spec.f(1.5) == doctest::Approx(-1.5 + std::pow(1.5, 3)));
  CHECK(spec.g(0.0) == 0.0);
  CHECK(spec.gprime(0.0) == 0.0);
  // h(s) = g(s)s/2 - G(s) = |s|^4 / 4
  for (double s : {-2.0, -0.3, 0.5, 1.7}) {
    CHECK(spec.h(s) == doctest::Approx(std::pow(std::abs(s), 4) / 4.0)
                           .epsilon(1e-14));
  }

  // H(s) = -(1/2 + 1/N) s^2 + G(s) + g(s)s/N at N=3, q=4:
  // -(5/6) s^2 + (7/12) s^4.
  const NonlinearitySpec n3 = makePowerPositiveMass(3, 4.0);
  for (double s : {0.5, 1.0, 2.0}) {
    const double want = -(5.0 / 6.0) * s * s + (7.0 / 12.0) * std::pow(s, 4);
    CHECK(n3.H(s) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK_THROWS_AS(makePowerPositiveMass(2, 2.0), PreconditionError);
}

TEST_CASE("derivative consistency by finite differences") {
  const double h = 1e-5;
  for (const NonlinearitySpec& spec :
       {makePowerZeroMass(3, 8.0), makePowerPositiveMass(2, 4.0)}) {
    for (double s : {-2.0, -0.7, 0.4, 1.3, 3.0}) {
      const double fd = (spec.f(s + h) - spec.f(s - h)) / (2 * h);
      CHECK(spec.fprime(s) ==
            doctest::Approx(fd).epsilon(1e-6));
      const double fdH = (spec.H(s + h) - spec.H(s - h)) / (2 * h);
      CHECK(spec.Hprime(s) == doctest::Approx(fdH).epsilon(1e-6));
      const double fdF = (spec.F(s + h) - spec.F(s - h)) / (2 * h);
      CHECK(spec.f(s) == doctest::Approx(fdF).epsilon(1e-6));
    }
  }
}

TEST_CASE("audit passes for the built-in power laws") {
  const AuditReport zero = auditAssumptions(makePowerZeroMass(3, 8.0));
  CHECK(zero.allPass());
  for (const char* name :
       {"origin-vanishing", "subcritical-at-origin", "s-Hprime-positive",
        "H-coercive", "fs-monotone-halflines", "F-dominated-by-fs"}) {
    const HypothesisCheck* c = zero.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->pass);
  }
  CHECK(zero.boundConstant > 0.0);
  CHECK(zero.boundConstant <= 1.0);  // |F| = |fs|/p for the power law

  const AuditReport pos = auditAssumptions(makePowerPositiveMass(2, 4.0));
  CHECK(pos.allPass());
  for (const char* name :
       {"origin-vanishing", "g-flat-at-origin", "g-ratio-increasing",
        "g-superlinear", "h-nonnegative", "gs-minus-2G-coercive",
        "scaling-monotone"}) {
    const HypothesisCheck* c = pos.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->pass);
  }
}

TEST_CASE("log-growth control fails exactly the domination bound") {
  const AuditReport report = auditAssumptions(makeLogZeroMass(3, 4));
  CHECK_FALSE(report.allPass());
  for (const HypothesisCheck& c : report.checks) {
    if (c.name == "F-dominated-by-fs") {
      CHECK_FALSE(c.pass);
    } else {
      CHECK(c.pass);
    }
  }
}

TEST_CASE("broken nonlinearity trips the half-line monotonicity check") {
  // f(s) s = s^4 - s^6 has an interior maximum on s > 0.
  const NonlinearitySpec broken = makeCustomZeroMass(
      3, "cubic-minus-quintic",
      [](double s) { return s * s * s - std::pow(s, 5); },
      [](double s) { return 3 * s * s - 5 * std::pow(s, 4); },
      [](double s) { return std::pow(s, 4) / 4 - std::pow(s, 6) / 6; });
  const AuditReport report = auditAssumptions(broken);
  const HypothesisCheck* c = report.find("fs-monotone-halflines");
  REQUIRE(c != nullptr);
  CHECK_FALSE(c->pass);
}

TEST_CASE("custom spec derives H from f and F") {
  const NonlinearitySpec ref = makePowerZeroMass(3, 8.0);
  const NonlinearitySpec custom = makeCustomZeroMass(
      3, "power-by-hand", [](double s) { return std::pow(std::abs(s), 6) * s; },
      [](double s) { return 7 * std::pow(std::abs(s), 6); },
      [](double s) { return std::pow(std::abs(s), 8) / 8; });
  for (double s : {-1.5, 0.25, 0.9, 2.0}) {
    CHECK(custom.H(s) == doctest::Approx(ref.H(s)).epsilon(1e-12));
    CHECK(custom.Hprime(s) == doctest::Approx(ref.Hprime(s)).epsilon(1e-7));
  }
}

TEST_CASE("audit rejects degenerate sample sets") {
  CHECK_THROWS_AS(auditAssumptions(makePowerZeroMass(3, 8.0), {}, {2.0}),
                  PreconditionError);
  CHECK_THROWS_AS(
      auditAssumptions(makePowerZeroMass(3, 8.0), {1e13}, {2.0}),
      PreconditionError);
}

TEST_CASE("regime names round-trip") {
  CHECK(regimeFromName("zero-mass") == Regime::ZeroMass);
  CHECK(regimeFromName("positive-mass") == Regime::PositiveMass);
  CHECK(regimeName(Regime::ZeroMass) == std::string("zero-mass"));
  CHECK_THROWS_AS(regimeFromName("massive"), ConfigurationError);
}
