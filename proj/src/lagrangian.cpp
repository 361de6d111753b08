#include "bigs/lagrangian.hpp"

#include <cmath>
#include <string>

#include "bigs/errors.hpp"

namespace bigs::lagrangian {

namespace {

void requireUnitInterval(double t, const char* fn) {
  if (!(std::abs(t) < 1.0)) {
    throw DomainError(std::string(fn) + ": slope " + std::to_string(t) +
                      " outside (-1, 1)");
  }
}

}  // namespace

double evalW(double t) {
  requireUnitInterval(t, "evalW");
  return t * t / (1.0 + std::sqrt(1.0 - t * t));
}

double evalw(double t) {
  requireUnitInterval(t, "evalw");
  return t / std::sqrt(1.0 - t * t);
}

double evalwp(double t) {
  requireUnitInterval(t, "evalwp");
  const double s = 1.0 - t * t;
  return 1.0 / (s * std::sqrt(s));
}

LagrangianEval evalAll(double t) {
  requireUnitInterval(t, "evalAll");
  const double s = 1.0 - t * t;
  const double root = std::sqrt(s);
  return {t, t * t / (1.0 + root), t / root, 1.0 / (s * root)};
}

double seriesCoeff(int j) {
  if (j < 1) {
    throw DomainError("seriesCoeff: index must be >= 1, got " +
                      std::to_string(j));
  }
  double b = 0.5;
  for (int k = 1; k < j; ++k) {
    b *= (2.0 * k - 1.0) / (2.0 * k + 2.0);
  }
  return b;
}

double evalWSeries(double t, int order) {
  requireUnitInterval(t, "evalWSeries");
  if (order < 1) {
    throw DomainError("evalWSeries: truncation order must be >= 1, got " +
                      std::to_string(order));
  }
  const double t2 = t * t;
  double b = 0.5;
  double power = t2;
  double sum = 0.0;
  for (int k = 1; k <= order; ++k) {
    sum += b * power;
    b *= (2.0 * k - 1.0) / (2.0 * k + 2.0);
    power *= t2;
  }
  return sum;
}

}  // namespace bigs::lagrangian
