#pragma once

#include <Eigen/Core>

namespace bigs::lagrangian {

// Membrane energy density W(t) = 1 - sqrt(1 - t^2) for slopes t in (-1, 1);
// even in t.  Evaluated as t^2 / (1 + sqrt(1 - t^2)) which is exact at t = 0
// and free of cancellation for small t.
double evalW(double t);

// Flux density w(t) = W'(t) = t / sqrt(1 - t^2); odd in t.
double evalw(double t);

// Flux derivative w'(t) = (1 - t^2)^(-3/2); even in t.
double evalwp(double t);

struct LagrangianEval {
  double t;
  double W;
  double w;
  double wp;
};

LagrangianEval evalAll(double t);

// Coefficient b_j of t^(2j) in 1 - sqrt(1 - t^2) = sum_{j>=1} b_j t^(2j).
// b_1 = 1/2 and b_{j+1} = b_j (2j - 1) / (2j + 2).
double seriesCoeff(int j);

// Partial sum of the series up to j = order.
double evalWSeries(double t, int order);

// Expression-friendly density for hot loops; takes the squared slope and
// performs no domain checks.
template <typename Derived>
auto densityW(const Eigen::ArrayBase<Derived>& t2) {
  return t2 / (1.0 + (1.0 - t2).sqrt());
}

}  // namespace bigs::lagrangian
