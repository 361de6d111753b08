#include "bigs/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bigs/errors.hpp"
#include "bigs/pohozaev.hpp"

namespace bigs {

const char* shotClassName(ShotClass c) {
  switch (c) {
    case ShotClass::CrossesZero: return "crosses-zero";
    case ShotClass::StaysPositiveUnboundedSlope: return "stays-positive";
    default: return "decays";
  }
}

double fluxInverse(double v) {
  // Large |v| rounds the quotient to exactly 1; clamp into the open
  // interval so recovered slopes stay strictly inside the light cone.
  const double cap = std::nextafter(1.0, 0.0);
  return std::clamp(v / std::sqrt(1.0 + v * v), -cap, cap);
}

namespace {

constexpr double kSlopeGuard = 1.0 - 1e-9;
constexpr double kDecayEps = 1e-6;

struct OdeState {
  double r, u, v;
};

// v' = -f(u) - (N - 1) v / r with u' = fluxInverse(v).
OdeState rhs(const OdeState& s, const NonlinearitySpec& spec) {
  const double up = fluxInverse(s.v);
  const double vp =
      -spec.f(s.u) - (spec.dimension - 1) * s.v / s.r;
  return {1.0, up, vp};
}

OdeState rk4Step(const OdeState& s, double dt, const NonlinearitySpec& spec) {
  const OdeState k1 = rhs(s, spec);
  const OdeState k2 = rhs({s.r + dt / 2, s.u + dt / 2 * k1.u,
                           s.v + dt / 2 * k1.v}, spec);
  const OdeState k3 = rhs({s.r + dt / 2, s.u + dt / 2 * k2.u,
                           s.v + dt / 2 * k2.v}, spec);
  const OdeState k4 = rhs({s.r + dt, s.u + dt * k3.u, s.v + dt * k3.v}, spec);
  return {s.r + dt,
          s.u + dt / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          s.v + dt / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

}  // namespace

ShootResult integrate(double s0, const NonlinearitySpec& spec,
                      const RadialGridPtr& grid, double stepTarget) {
  if (!(s0 > 0.0)) {
    throw PreconditionError("integrate: initial height must be positive");
  }
  const Eigen::Index n = grid->size();
  const double h = grid->spacing();
  if (stepTarget <= 0.0) stepTarget = grid->radius() / 1e5;
  const int substeps = std::max(1, static_cast<int>(std::ceil(h / stepTarget)));
  const double dt = h / substeps;
  const double vGuard = kSlopeGuard / std::sqrt(1.0 - kSlopeGuard * kSlopeGuard);
  const double growthGuard = 100.0 * std::max(1.0, s0);

  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(n);
  values[0] = s0;

  // First substep by Taylor through the r = 0 coordinate singularity, to
  // the same local order as the RK4 steps.  With u' = alpha r + beta r^3,
  // matching v' + (N-1)v/r = -f(u) at orders r^0 and r^2 gives
  //   alpha = -f0/N,  beta = f0 f0'/(2N(N+2)) + f0^3/(2N^3),
  // where the cubic term of w(u') = u' + u'^3/2 + ... feeds the f0^3 piece.
  const double N = spec.dimension;
  const double f0 = spec.f(s0);
  const double fp0 = spec.fprime(s0);
  const double alpha = -f0 / N;
  const double beta =
      f0 * fp0 / (2.0 * N * (N + 2.0)) + f0 * f0 * f0 / (2.0 * N * N * N);
  OdeState state{dt, s0 + alpha * dt * dt / 2.0 + beta * dt * dt * dt * dt / 4.0,
                 alpha * dt + f0 * fp0 * dt * dt * dt / (2.0 * N * (N + 2.0))};

  bool stopped = false;
  ShotClass cls = ShotClass::StaysPositiveUnboundedSlope;
  double stopRadius = grid->radius();
  double terminal = s0;
  int sub = 1;  // substeps taken within the current cell
  Eigen::Index cell = 0;

  while (!stopped && cell < n - 1) {
    while (sub < substeps) {
      state = rk4Step(state, dt, spec);
      ++sub;
      if (state.u <= 0.0 || std::abs(state.v) > vGuard ||
          state.u > growthGuard ||
          (std::abs(state.u) <= kDecayEps * s0 &&
           std::abs(state.v) <= kDecayEps)) {
        stopped = true;
        break;
      }
    }
    if (!stopped) {
      // state.r is now the node r_{cell+1}
      values[cell + 1] = state.u;
      ++cell;
      sub = 0;
      if (cell == n - 1) break;
      if (std::abs(state.u) <= kDecayEps * s0 &&
          std::abs(state.v) <= kDecayEps) {
        stopped = true;
      }
    }
  }

  if (stopped) {
    stopRadius = state.r;
    terminal = state.u;
    if (state.u <= 0.0) {
      cls = ShotClass::CrossesZero;
    } else if (std::abs(state.u) <= kDecayEps * s0 &&
               std::abs(state.v) <= kDecayEps) {
      cls = ShotClass::Decays;
    } else {
      cls = ShotClass::StaysPositiveUnboundedSlope;
    }
    // nodes past the stop radius stay zero; the partial cell keeps its
    // last recorded node value
  } else {
    terminal = values[n - 1];
    stopRadius = grid->radius();
    cls = std::abs(terminal) <= 1e-3 * s0
              ? ShotClass::Decays
              : ShotClass::StaysPositiveUnboundedSlope;
    values[n - 1] = 0.0;  // Dirichlet trace for the functional evaluation
  }

  ShootResult out{s0, Profile(grid, std::move(values)), cls,
                  terminal, stopRadius, 0.0, 0.0, 0.0};
  if (out.profile.admissible(1e-12)) {
    out.psiValue = psi(out.profile);
    out.energy = energy(out.profile, spec);
    out.pohozaevResidual = pohozaev(out.profile, spec);
  }
  return out;
}

ShootResult findGround(const NonlinearitySpec& spec, const RadialGridPtr& grid,
                       double sLo, double sHi, double stepTarget) {
  if (!(0.0 < sLo && sLo < sHi)) {
    throw PreconditionError("findGround: need 0 < sLo < sHi");
  }
  ShootResult lo = integrate(sLo, spec, grid, stepTarget);
  ShootResult hi = integrate(sHi, spec, grid, stepTarget);
  if (lo.classification == ShotClass::Decays) return lo;
  if (hi.classification == ShotClass::Decays) return hi;
  const bool loCrosses = lo.classification == ShotClass::CrossesZero;
  const bool hiCrosses = hi.classification == ShotClass::CrossesZero;
  if (loCrosses == hiCrosses) {
    throw BracketError(
        "findGround: endpoints classify alike (" +
        std::string(shotClassName(lo.classification)) + " at s = " +
        std::to_string(sLo) + ", " + shotClassName(hi.classification) +
        " at s = " + std::to_string(sHi) + ")");
  }
  double a = sLo, b = sHi;
  ShootResult best = loCrosses ? hi : lo;  // non-crossing side
  const double floorWidth =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, sHi);
  while (b - a > floorWidth) {
    const double mid = 0.5 * (a + b);
    ShootResult shot = integrate(mid, spec, grid, stepTarget);
    if (shot.classification == ShotClass::Decays) return shot;
    const bool crosses = shot.classification == ShotClass::CrossesZero;
    if (!crosses) best = std::move(shot);
    ((crosses == loCrosses) ? a : b) = mid;
  }
  return best;
}

}  // namespace bigs
