#include "bigs/pointcharge.hpp"

#include <cmath>
#include <functional>

#include "bigs/errors.hpp"

namespace bigs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpsonRecurse(const std::function<double(double)>& f, double a,
                      double m, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= 15.0 * tol) {
    return refined + (refined - whole) / 15.0;
  }
  return simpsonRecurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol,
                        depth - 1) +
         simpsonRecurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol,
                        depth - 1);
}

double adaptiveSimpson(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpsonRecurse(f, a, m, b, fa, fm, fb, whole, tol, 60);
}

// 1 - 1/sqrt(1+x) without cancellation for small x.
double oneMinusInvSqrt1p(double x) {
  const double s = std::sqrt(1.0 + x);
  return x / (s * (1.0 + s));
}

}  // namespace

double pointChargeIntegrand(double r, double b) {
  if (r <= 0.0) return 0.0;
  const double r2 = r * r;
  if (r2 * r2 <= b * b) {
    // x = b^2 / r^4 >= 1: the direct form has no cancellation here.
    return r2 * (1.0 - r2 / std::sqrt(r2 * r2 + b * b));
  }
  const double x = (b / r2) * (b / r2);
  return r2 * oneMinusInvSqrt1p(x);
}

double pointChargeEnergy(double b, double rMax, double tol) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw PreconditionError("pointChargeEnergy: b must be positive");
  }
  if (!(rMax > 0.0)) {
    throw PreconditionError("pointChargeEnergy: rMax must be positive");
  }
  if (!(tol > 0.0)) {
    throw PreconditionError("pointChargeEnergy: tol must be positive");
  }
  const double rSplit = std::min(rMax, 2.0 * std::max(1.0, std::sqrt(b)));
  auto near = [b](double r) { return pointChargeIntegrand(r, b); };
  double total = adaptiveSimpson(near, 0.0, rSplit, tol);
  if (rMax > rSplit) {
    // t = 1/r maps [rSplit, rMax] to [1/rMax, 1/rSplit]; the transformed
    // integrand b^2 / (sqrt(1+x)(1+sqrt(1+x))), x = b^2 t^4, is smooth and
    // tends to b^2/2 at t = 0.
    auto far = [b](double t) {
      const double t2 = t * t;
      const double x = (b * t2) * (b * t2);
      const double s = std::sqrt(1.0 + x);
      return b * b / (s * (1.0 + s));
    };
    const double lo = std::isfinite(rMax) ? 1.0 / rMax : 0.0;
    total += adaptiveSimpson(far, lo, 1.0 / rSplit, tol);
  }
  return 4.0 * kPi * total;
}

PointChargeResult pointChargeSweep(double b, double rMax0, double tolDoubling,
                                   int maxDoublings, double tol) {
  if (!(rMax0 > 0.0) || !std::isfinite(rMax0)) {
    throw PreconditionError("pointChargeSweep: rMax0 must be positive");
  }
  if (maxDoublings < 1) {
    throw PreconditionError("pointChargeSweep: need at least one doubling");
  }
  PointChargeResult out;
  out.b = b;
  double r = rMax0;
  double prev = pointChargeEnergy(b, r, tol);
  out.table.push_back({r, prev});
  for (int k = 0; k < maxDoublings; ++k) {
    r *= 2.0;
    const double e = pointChargeEnergy(b, r, tol);
    out.table.push_back({r, e});
    out.doublingDelta = std::abs(e - prev);
    prev = e;
    if (out.doublingDelta <= tolDoubling * std::abs(e)) break;
  }
  out.energy = prev;
  out.rMax = r;
  return out;
}

}  // namespace bigs
