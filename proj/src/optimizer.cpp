#include "bigs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include "bigs/errors.hpp"
#include "bigs/lagrangian.hpp"
#include "bigs/random.hpp"

namespace bigs {

void SolverConfig::validate() const {
  if (dimension < 1) {
    throw ConfigurationError("dimension must be >= 1");
  }
  if (regime == Regime::ZeroMass && dimension < 3) {
    throw ConfigurationError("zero-mass regime needs dimension >= 3");
  }
  if (gridNodes < 3) {
    throw ConfigurationError("grid_n must be >= 3");
  }
  if (gridRadius > 0.0 && !std::isfinite(gridRadius)) {
    throw ConfigurationError("grid_r must be finite");
  }
  if (!(interiorMargin > 0.0 && interiorMargin < 0.5)) {
    throw ConfigurationError("interior_margin must lie in (0, 0.5)");
  }
  if (maxIterations < 1) {
    throw ConfigurationError("max_iterations must be >= 1");
  }
  if (!(stepInitial > 0.0)) {
    throw ConfigurationError("step_initial must be positive");
  }
  if (!(stepShrink > 0.0 && stepShrink < 1.0)) {
    throw ConfigurationError("step_shrink must lie in (0, 1)");
  }
  if (!(tolEnergyStall > 0.0) || !(tolGradient > 0.0) ||
      !(tolPohozaev > 0.0) || !(tolRoot > 0.0)) {
    throw ConfigurationError("tolerances must be positive");
  }
  if (stallWindow < 2) {
    throw ConfigurationError("stall_window must be >= 2");
  }
  if (multiStart < 1) {
    throw ConfigurationError("multi_start must be >= 1");
  }
  if (k1 != 0 || k2 != 0) {
    if (k1 < 2 || k2 < 2) {
      throw ConfigurationError("block factors k1, k2 must be >= 2");
    }
    if (k1 + k2 != dimension) {
      throw ConfigurationError("dimension must equal k1 + k2");
    }
  }
}

double SolverConfig::effectiveRadius() const {
  if (gridRadius > 0.0) return gridRadius;
  if (regime == Regime::ZeroMass) {
    // Zero-mass tails decay only algebraically; trade tail truncation
    // against core resolution at the default node counts.
    return std::max(20.0, 120.0 / dimension);
  }
  return 25.0;  // exponential decay, e^-25 is below roundoff
}

NonlinearitySpec SolverConfig::makeSpec() const {
  return regime == Regime::ZeroMass
             ? makePowerZeroMass(dimension, exponent)
             : makePowerPositiveMass(dimension, exponent);
}

const char* signClassName(SignClass sign) {
  switch (sign) {
    case SignClass::Positive: return "positive";
    case SignClass::Negative: return "negative";
    default: return "sign-changing";
  }
}

namespace {

struct Projected {
  Profile profile;
  ProjectionResult projection;
};

// Scale onto the manifold, then restore the Dirichlet boundary by removing
// the linear ramp through whatever value the resampled tail carried.
Projected projectToManifold(const Profile& u, const NonlinearitySpec& spec,
                            double tolRoot) {
  ProjectionResult pr = thetaOf(u, spec, tolRoot);
  Profile scaled = resampleScaled(u, pr.theta);
  const Eigen::Index n = scaled.values().size();
  const double boundary = scaled.values()[n - 1];
  if (boundary != 0.0) {
    Eigen::ArrayXd vals =
        scaled.values() -
        boundary * (scaled.grid().nodes() / scaled.grid().radius());
    scaled = Profile(scaled.gridPtr(), std::move(vals));
  }
  return {std::move(scaled), pr};
}

DescentStep descendAlong(const Profile& u, const NonlinearitySpec& spec,
                         const Eigen::ArrayXd& direction, double step,
                         const SolverConfig& config, double referenceEnergy,
                         bool* capLimited) {
  const Eigen::Index n = u.values().size();
  const double acceptSlack =
      1e-12 * std::max(1.0, std::abs(referenceEnergy));
  *capLimited = false;
  for (int tries = 0; tries < 60; ++tries) {
    Eigen::ArrayXd vals = u.values() - step * direction;
    vals[n - 1] = 0.0;
    Profile cand(u.gridPtr(), std::move(vals));
    if (!cand.admissible(config.interiorMargin) || cand.maxAbs() == 0.0) {
      *capLimited = !cand.admissible(config.interiorMargin);
      step *= config.stepShrink;
      continue;
    }
    try {
      Projected proj = projectToManifold(cand, spec, config.tolRoot);
      const double e = energy(proj.profile, spec);
      if (e <= referenceEnergy + acceptSlack) {
        return {std::move(proj.profile), e, proj.projection.theta, step, true};
      }
    } catch (const NoRootError&) {
      // candidate left the projectable cone; shrink and retry
    }
    *capLimited = false;
    step *= config.stepShrink;
  }
  return {u, referenceEnergy, 1.0, step, false};
}

SignClass classifySign(const Eigen::ArrayXd& v) {
  const double scale = v.abs().maxCoeff();
  const double tol = 1e-9 * scale;
  const bool hasPos = (v > tol).any();
  const bool hasNeg = (v < -tol).any();
  if (hasPos && hasNeg) return SignClass::SignChanging;
  return hasNeg ? SignClass::Negative : SignClass::Positive;
}

bool isRadiallyMonotone(const Eigen::ArrayXd& v) {
  const double tol = 1e-9 * v.abs().maxCoeff();
  const Eigen::Index n = v.size();
  const Eigen::ArrayXd mag = v.abs();
  return ((mag.tail(n - 1) - mag.head(n - 1)) <= tol).all();
}

double tailRatioOf(const Profile& u) {
  // Fraction of the membrane energy past 0.9 R.  A sup-based ratio would
  // misfire on zero-mass minimizers, whose algebraic r^-(N-2) tails keep
  // sup-level mass near the boundary at any affordable radius while
  // contributing almost nothing to the energy.
  Eigen::ArrayXd wd = lagrangian::densityW(u.cellDerivative().square());
  const double total = u.grid().integrateCells(wd);
  if (total <= 0.0) return 0.0;
  const Eigen::ArrayXd& r = u.grid().nodes();
  const double cut = 0.9 * u.grid().radius();
  for (Eigen::Index i = 0; i < wd.size(); ++i) {
    if (r[i] < cut) wd[i] = 0.0;
  }
  return u.grid().integrateCells(wd) / total;
}

// Metric for the descent direction: the tridiagonal Hessian of Psi at the
// current slopes (plus the quadratic mass term in the positive-mass
// regime).  It carries all the 1/h^2 stiffness of the problem, so solving
// against it makes the preconditioned Hessian O(1)-conditioned; solves are
// O(n) by the Thomas algorithm.  SPD: cell stiffnesses are positive and
// the last node is pinned.
struct OperatorMetric {
  Eigen::ArrayXd lower, diag, upper;

  static OperatorMetric at(const Profile& u, const NonlinearitySpec& spec) {
    const RadialGrid& grid = u.grid();
    const Eigen::Index n = grid.size();
    const double h2 = grid.spacing() * grid.spacing();
    const double omega = grid.sphereArea();
    const Eigen::ArrayXd& mu = grid.cellMass();
    const Eigen::ArrayXd& d = u.cellDerivative();
    Eigen::ArrayXd stiff(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      stiff[i] = omega * lagrangian::evalwp(std::abs(d[i])) * mu[i] / h2;
    }
    OperatorMetric m;
    m.lower = Eigen::ArrayXd::Zero(n);
    m.diag = Eigen::ArrayXd::Zero(n);
    m.upper = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      m.diag[i] = stiff[i] + (i > 0 ? stiff[i - 1] : 0.0);
      m.upper[i] = -stiff[i];
      m.lower[i + 1] = -stiff[i];
    }
    if (spec.regime == Regime::PositiveMass) {
      m.diag.head(n - 1) += omega * grid.nodeWeights().head(n - 1);
    }
    // Dirichlet-pinned last node.
    m.diag[n - 1] = 1.0;
    m.lower[n - 1] = 0.0;
    m.upper[n - 2] = 0.0;
    return m;
  }

  Eigen::ArrayXd solve(const Eigen::ArrayXd& rhs) const {
    const Eigen::Index n = diag.size();
    Eigen::ArrayXd c(n), x(n);
    double piv = diag[0];
    c[0] = upper[0] / piv;
    x[0] = rhs[0] / piv;
    for (Eigen::Index i = 1; i < n; ++i) {
      piv = diag[i] - lower[i] * c[i - 1];
      c[i] = upper[i] / piv;
      x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) {
      x[i] -= c[i] * x[i + 1];
    }
    return x;
  }
};

}  // namespace

Eigen::ArrayXd functionalGradient(const Profile& u,
                                  const NonlinearitySpec& spec,
                                  double margin) {
  Eigen::ArrayXd g =
      OperatorMetric::at(u, spec).solve(gradEnergy(u, spec, margin));
  g[g.size() - 1] = 0.0;
  return g;
}

DescentStep descendAndProject(const Profile& u, const NonlinearitySpec& spec,
                              double step, const SolverConfig& config,
                              double referenceEnergy) {
  const Eigen::ArrayXd direction =
      functionalGradient(u, spec, config.interiorMargin);
  bool capLimited = false;
  return descendAlong(u, spec, direction, step, config, referenceEnergy,
                      &capLimited);
}

Profile initialBump(const RadialGridPtr& grid, double amplitude,
                    double width) {
  if (!(amplitude != 0.0) || !(width > 0.0)) {
    throw PreconditionError("initialBump: need nonzero amplitude, width > 0");
  }
  const Eigen::ArrayXd& r = grid->nodes();
  const double floor = std::exp(-std::pow(grid->radius() / width, 2));
  Eigen::ArrayXd vals =
      amplitude * ((-(r / width).square()).exp() - floor);
  vals[vals.size() - 1] = 0.0;
  return Profile(grid, std::move(vals));
}

GroundStateResult minimizeFrom(Profile start, const SolverConfig& config,
                               const NonlinearitySpec& spec) {
  config.validate();
  if (spec.dimension != start.grid().dimension()) {
    throw PreconditionError(
        "minimizeFrom: spec dimension does not match the grid");
  }
  if (start.maxAbs() == 0.0) {
    throw DegenerateInputError("minimizeFrom: start profile is zero");
  }
  // Seeds just need to be interior; rescale amplitude if the caller's start
  // touches the slope cap.
  if (!start.admissible(config.interiorMargin)) {
    const double shrink =
        (1.0 - config.interiorMargin) / start.supGradient() * 0.999;
    start = Profile(start.gridPtr(), start.values() * shrink);
  }

  Projected init = projectToManifold(start, spec, config.tolRoot);
  GroundStateResult result{std::move(init.profile)};
  Profile& u = result.profile;
  result.thetaHistory.reserve(256);
  result.thetaHistory.push_back(init.projection.theta);

  // Hypothesis audit is advisory here: record failures and continue.
  const AuditReport audit = auditAssumptions(spec);
  for (const auto& check : audit.checks) {
    if (!check.pass) result.auditWarnings.push_back(check.name);
  }

  double e = energy(u, spec);
  OperatorMetric metric = OperatorMetric::at(u, spec);
  Eigen::ArrayXd rawEnergy = gradEnergy(u, spec, config.interiorMargin);
  Eigen::ArrayXd grad = metric.solve(rawEnergy);
  Eigen::ArrayXd prevValues = u.values();
  Eigen::ArrayXd prevGrad = grad;
  double trialStep = config.stepInitial;
  std::deque<double> window;
  window.push_back(e);

  int iter = 0;
  std::string termination;
  double pgn = 0.0;
  while (iter < config.maxIterations) {
    // Lagrange stationarity residual: the energy gradient minus its
    // manifold-normal component, measured in the metric's dual norm.
    const Eigen::ArrayXd rawM =
        gradPohozaev(u, spec, config.interiorMargin);
    const Eigen::ArrayXd gm = metric.solve(rawM);
    const double ee = (grad * rawEnergy).sum();
    const double em = (grad * rawM).sum();
    const double mm = (gm * rawM).sum();
    pgn = std::sqrt(std::max(0.0, ee - (mm > 0.0 ? em * em / mm : 0.0)));
    if (pgn <= config.tolGradient) {
      termination = "gradient";
      break;
    }

    // Step along the tangential part: the normal component only shifts the
    // projection scaling, so removing it keeps theta near 1 and the
    // reprojection cheap and quiet.
    Eigen::ArrayXd direction = grad;
    if (mm > 0.0) direction -= (em / mm) * gm;
    direction[direction.size() - 1] = 0.0;

    bool capLimited = false;
    DescentStep ds =
        descendAlong(u, spec, direction, trialStep, config, e, &capLimited);
    ++iter;
    if (!ds.accepted) {
      if (capLimited) {
        std::ostringstream os;
        os << "descent stalled against the slope cap: max |du| = "
           << u.supGradient() << ", projected gradient " << pgn
           << ", iteration " << iter;
        throw NumericalFailure(os.str());
      }
      termination = "stall";
      break;
    }

    prevValues = u.values();
    prevGrad = grad;
    u = std::move(ds.next);
    e = ds.energy;
    result.thetaHistory.push_back(ds.theta);
    metric = OperatorMetric::at(u, spec);
    rawEnergy = gradEnergy(u, spec, config.interiorMargin);
    grad = metric.solve(rawEnergy);

    // Barzilai-Borwein trial step from the accepted move.
    const Eigen::ArrayXd s = u.values() - prevValues;
    const Eigen::ArrayXd y = grad - prevGrad;
    const double sy = (s * y).sum();
    const double ss = (s * s).sum();
    trialStep = (sy > 0.0 && ss > 0.0) ? std::clamp(ss / sy, 1e-10, 1e4)
                                       : config.stepInitial;

    window.push_back(e);
    if (static_cast<int>(window.size()) > config.stallWindow + 1) {
      window.pop_front();
    }
    if (static_cast<int>(window.size()) == config.stallWindow + 1 &&
        window.front() - e <=
            config.tolEnergyStall * std::max(1.0, std::abs(e))) {
      termination = "stall";
      break;
    }
  }
  if (termination.empty()) termination = "max-iterations";

  // Final polish: reproject until the manifold residual sits well inside
  // the reporting tolerance (the boundary ramp perturbs it slightly).
  for (int pass = 0; pass < 30; ++pass) {
    const double resid = std::abs(pohozaev(u, spec));
    if (resid <= 0.05 * config.tolPohozaev * std::max(1.0, psi(u))) break;
    u = projectToManifold(u, spec, config.tolRoot).profile;
  }

  result.energy = energy(u, spec);
  result.psiValue = psi(u);
  result.pohozaevResidual = pohozaev(u, spec);
  result.supGradient = u.supGradient();
  result.projectedGradientNorm = pgn;
  result.iterations = iter;
  result.termination = termination;
  result.sign = classifySign(u.values());
  result.monotone = isRadiallyMonotone(u.values());
  // The zero-mass minimizer keeps ~0.3% of the membrane energy in the tail
  // band at the default radius (algebraic decay); warn only when the band
  // holds enough energy to mean the truncation radius is badly undersized.
  result.tailRatio = tailRatioOf(u);
  result.tailWarning = result.tailRatio > 1e-2;
  return result;
}

GroundStateResult minimize(const SolverConfig& config,
                           const NonlinearitySpec& spec) {
  config.validate();
  const double radius = config.effectiveRadius();
  auto grid = makeRadialGrid(config.dimension, radius, config.gridNodes);
  const double width =
      config.initWidth > 0.0 ? config.initWidth : radius / 6.0;
  const double amplitude =
      config.initAmplitude > 0.0
          ? config.initAmplitude
          : (config.regime == Regime::ZeroMass ? 1.2 : 2.2);
  return minimizeFrom(initialBump(grid, amplitude, width), config, spec);
}

std::vector<std::pair<double, double>> pathScan(const Profile& u,
                                                const NonlinearitySpec& spec,
                                                const Eigen::ArrayXd& thetas) {
  if (thetas.size() < 2) {
    throw ConfigurationError("pathScan: need at least 2 scan points");
  }
  if (!(thetas.minCoeff() < 1.0 && thetas.maxCoeff() > 1.0)) {
    throw ConfigurationError("pathScan: theta grid must bracket 1");
  }
  const double psiU = psi(u);
  const double resid = std::abs(pohozaev(u, spec));
  if (resid > 1e-3 * std::max(1.0, psiU)) {
    throw PreconditionError(
        "pathScan: profile is not on the manifold, |M| = " +
        std::to_string(resid));
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(thetas.size());
  for (Eigen::Index i = 0; i < thetas.size(); ++i) {
    out.emplace_back(thetas[i], scaledEnergy(u, spec, thetas[i]));
  }
  return out;
}

Eigen::ArrayXd logThetaGrid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw ConfigurationError("logThetaGrid: need 0 < lo < hi and count >= 2");
  }
  Eigen::ArrayXd out(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  }
  return out;
}

MultiStartReport multiStart(const SolverConfig& config,
                            const NonlinearitySpec& spec, int starts) {
  if (starts < 1) {
    throw ConfigurationError("multiStart: need at least one start");
  }
  config.validate();
  const double radius = config.effectiveRadius();
  auto grid = makeRadialGrid(config.dimension, radius, config.gridNodes);
  const double baseWidth =
      config.initWidth > 0.0 ? config.initWidth : radius / 6.0;
  const double baseAmp =
      config.initAmplitude > 0.0
          ? config.initAmplitude
          : (config.regime == Regime::ZeroMass ? 1.2 : 2.2);

  std::optional<GroundStateResult> best;
  std::vector<double> energies;
  int failures = 0;
  std::vector<std::string> failureMessages;
  for (int k = 0; k < starts; ++k) {
    Rng rng = Rng::forStream(config.seed, static_cast<std::uint64_t>(k));
    const double width = baseWidth * rng.uniform(0.6, 1.8);
    const double amp = baseAmp * rng.uniform(0.7, 1.4);
    try {
      GroundStateResult r =
          minimizeFrom(initialBump(grid, amp, width), config, spec);
      energies.push_back(r.energy);
      if (!best || r.energy < best->energy) {
        best = std::move(r);
      }
    } catch (const Error& err) {
      ++failures;
      failureMessages.emplace_back(err.what());
    }
  }
  if (!best) {
    std::string all = "multiStart: every start failed";
    for (const auto& m : failureMessages) all += "; " + m;
    throw NumericalFailure(all);
  }
  const auto [mn, mx] = std::minmax_element(energies.begin(), energies.end());
  const double spread = (*mx - *mn) / std::abs(best->energy);
  return MultiStartReport{std::move(*best), std::move(energies), spread,
                          failures, std::move(failureMessages)};
}

}  // namespace bigs
