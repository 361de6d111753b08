#include "bigs/nonradial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "bigs/errors.hpp"
#include "bigs/lagrangian.hpp"

namespace bigs {

BlockRadialGrid::BlockRadialGrid(int k1, int k2, double radius,
                                 Eigen::Index nodesPerAxis)
    : axis1_(k1, radius, nodesPerAxis),
      axis2_(k2, radius, nodesPerAxis),
      angular_(sphereArea(k1) * sphereArea(k2)) {
  if (k1 < 2 || k2 < 2) {
    throw ConfigurationError("block factors k1, k2 must be >= 2");
  }
}

double BlockRadialGrid::integrate(const Eigen::MatrixXd& nodal) const {
  if (nodal.rows() != size() || nodal.cols() != size()) {
    throw PreconditionError("BlockRadialGrid::integrate: shape mismatch");
  }
  return angular_ * (axis1_.nodeWeights().matrix().transpose() * nodal *
                     axis2_.nodeWeights().matrix())(0, 0);
}

BlockRadialGridPtr makeBlockRadialGrid(int k1, int k2, double radius,
                                       Eigen::Index nodesPerAxis) {
  return std::make_shared<const BlockRadialGrid>(k1, k2, radius,
                                                 nodesPerAxis);
}

TauProfile::TauProfile(BlockRadialGridPtr grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw PreconditionError("TauProfile: null grid");
  }
  const Eigen::Index n = grid_->size();
  if (values_.rows() != n || values_.cols() != n) {
    throw PreconditionError("TauProfile: values shape mismatch");
  }
  if (!values_.array().isFinite().all()) {
    throw NumericalFailure("TauProfile: non-finite nodal value");
  }
  const Eigen::Index m = n - 1;
  const double h = grid_->spacing();
  const auto& U = values_;
  lower1_ = (U.block(1, 0, m, m) - U.block(0, 0, m, m)) / h;
  lower2_ = (U.block(1, 1, m, m) - U.block(1, 0, m, m)) / h;
  upper1_ = (U.block(1, 1, m, m) - U.block(0, 1, m, m)) / h;
  upper2_ = (U.block(0, 1, m, m) - U.block(0, 0, m, m)) / h;
  sup_gradient_ = std::sqrt(std::max(
      (lower1_.array().square() + lower2_.array().square()).maxCoeff(),
      (upper1_.array().square() + upper2_.array().square()).maxCoeff()));
}

double TauProfile::maxAbs() const { return values_.array().abs().maxCoeff(); }

double TauProfile::maxDiagonalAbs() const {
  return values_.diagonal().array().abs().maxCoeff();
}

Eigen::MatrixXd tauApply(const Eigen::MatrixXd& values) {
  return -values.transpose();
}

TauProfile tauProject(const BlockRadialGridPtr& grid,
                      const Eigen::MatrixXd& values) {
  // Both axes share the same nodes, so the swap pairs nodes exactly even
  // when k1 != k2.
  return TauProfile(grid, 0.5 * (values - values.transpose()));
}

namespace {

constexpr double kAdmissibleSlack = 1e-12;

void requireAdmissible2(const TauProfile& u, double margin, const char* fn) {
  if (!(u.supGradient() <= 1.0 - margin)) {
    throw ConstraintViolation(
        std::string(fn) + ": block profile leaves the admissible set, "
                          "max |grad| = " +
            std::to_string(u.supGradient()),
        u.supGradient());
  }
}

double cellQuadrature(const BlockRadialGrid& grid,
                      const Eigen::MatrixXd& cells) {
  return grid.angularFactor() *
         (grid.cellMass1().matrix().transpose() * cells *
          grid.cellMass2().matrix())(0, 0);
}

Eigen::MatrixXd nodalMap2(const TauProfile& u,
                          const std::function<double(double)>& fn,
                          double scale) {
  const Eigen::MatrixXd& U = u.values();
  Eigen::MatrixXd out(U.rows(), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      out(i, j) = fn(scale * U(i, j));
    }
  }
  return out;
}

}  // namespace

double psi2(const TauProfile& u) {
  requireAdmissible2(u, kAdmissibleSlack, "psi2");
  const Eigen::ArrayXXd gLow2 =
      u.lowerD1().array().square() + u.lowerD2().array().square();
  const Eigen::ArrayXXd gUp2 =
      u.upperD1().array().square() + u.upperD2().array().square();
  // Each triangle carries half the cell mass.
  return 0.5 * cellQuadrature(u.grid(),
                              (lagrangian::densityW(gLow2) +
                               lagrangian::densityW(gUp2)).matrix());
}

double targetH2(const TauProfile& u, const NonlinearitySpec& spec,
                double theta) {
  return u.grid().integrate(nodalMap2(u, spec.H, theta));
}

double integralH2(const TauProfile& u, const NonlinearitySpec& spec) {
  return targetH2(u, spec, 1.0);
}

BlockFunctionals functionals2(const TauProfile& u,
                              const NonlinearitySpec& spec) {
  BlockFunctionals out;
  out.psi = psi2(u);
  out.phi = u.grid().integrate(nodalMap2(u, spec.F, 1.0));
  const Eigen::MatrixXd& U = u.values();
  Eigen::MatrixXd fu(U.rows(), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      fu(i, j) = spec.f(U(i, j)) * U(i, j);
    }
  }
  out.phiPrimeU = u.grid().integrate(fu);
  out.energy = out.psi - out.phi;
  out.pohozaev = out.psi - integralH2(u, spec);
  return out;
}

namespace {

// Gradient of psi2 through the per-triangle gradients; boundary row and
// column pinned.
Eigen::MatrixXd gradPsi2Pinned(const TauProfile& u) {
  const BlockRadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  const Eigen::Index m = n - 1;
  const Eigen::ArrayXXd l1 = u.lowerD1().array();
  const Eigen::ArrayXXd l2 = u.lowerD2().array();
  const Eigen::ArrayXXd p1 = u.upperD1().array();
  const Eigen::ArrayXXd p2 = u.upperD2().array();
  // dW/d|g| / |g| = (1 - |g|^2)^(-1/2)
  const Eigen::ArrayXXd qLow = (1.0 - l1.square() - l2.square()).rsqrt();
  const Eigen::ArrayXXd qUp = (1.0 - p1.square() - p2.square()).rsqrt();
  const Eigen::ArrayXXd mass = (grid.cellMass1().matrix() *
                                grid.cellMass2().matrix().transpose())
                                   .array();
  const double scale = grid.angularFactor() / (2.0 * grid.spacing());
  const Eigen::MatrixXd aL1 = (scale * qLow * l1 * mass).matrix();
  const Eigen::MatrixXd aL2 = (scale * qLow * l2 * mass).matrix();
  const Eigen::MatrixXd aU1 = (scale * qUp * p1 * mass).matrix();
  const Eigen::MatrixXd aU2 = (scale * qUp * p2 * mass).matrix();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, n);
  grad.block(0, 0, m, m) -= aL1 + aU2;
  grad.block(1, 0, m, m) += aL1 - aL2;
  grad.block(0, 1, m, m) += aU2 - aU1;
  grad.block(1, 1, m, m) += aL2 + aU1;
  grad.row(n - 1).setZero();
  grad.col(n - 1).setZero();
  return grad;
}

Eigen::MatrixXd weightOuter(const BlockRadialGrid& grid) {
  return grid.nodeWeights1().matrix() * grid.nodeWeights2().matrix().transpose();
}

}  // namespace

Eigen::MatrixXd gradEnergy2(const TauProfile& u, const NonlinearitySpec& spec,
                            double margin) {
  requireAdmissible2(u, margin, "gradEnergy2");
  const BlockRadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  Eigen::MatrixXd grad = gradPsi2Pinned(u);
  const Eigen::MatrixXd w2 = weightOuter(grid);
  const Eigen::MatrixXd& U = u.values();
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      grad(i, j) -= grid.angularFactor() * w2(i, j) * spec.f(U(i, j));
    }
  }
  return grad;
}

Eigen::MatrixXd gradPohozaev2(const TauProfile& u,
                              const NonlinearitySpec& spec, double margin) {
  requireAdmissible2(u, margin, "gradPohozaev2");
  const BlockRadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  Eigen::MatrixXd grad = gradPsi2Pinned(u);
  const Eigen::MatrixXd w2 = weightOuter(grid);
  const Eigen::MatrixXd& U = u.values();
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      grad(i, j) -= grid.angularFactor() * w2(i, j) * spec.Hprime(U(i, j));
    }
  }
  return grad;
}

TauProfile resampleScaled2(const TauProfile& u, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw PreconditionError("resampleScaled2: theta must be positive");
  }
  if (theta == 1.0) return u;
  const BlockRadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  const double h = grid.spacing();
  const double R = grid.radius();
  const Eigen::MatrixXd& U = u.values();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double y = grid.nodes()[j] / theta;
    if (y > R) {
      out.col(j).setZero();
      continue;
    }
    const auto jy = std::min(static_cast<Eigen::Index>(y / h), n - 2);
    const double fy = (y - grid.nodes()[jy]) / h;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = grid.nodes()[i] / theta;
      if (x > R) {
        out(i, j) = 0.0;
        continue;
      }
      const auto ix = std::min(static_cast<Eigen::Index>(x / h), n - 2);
      const double fx = (x - grid.nodes()[ix]) / h;
      const double v00 = U(ix, jy), v10 = U(ix + 1, jy);
      const double v01 = U(ix, jy + 1), v11 = U(ix + 1, jy + 1);
      out(i, j) = theta * ((1 - fx) * ((1 - fy) * v00 + fy * v01) +
                           fx * ((1 - fy) * v10 + fy * v11));
    }
  }
  return TauProfile(u.gridPtr(), std::move(out));
}

ProjectionResult thetaOf2(const TauProfile& u, const NonlinearitySpec& spec,
                          double tolRoot) {
  if (u.maxAbs() == 0.0) {
    throw DegenerateInputError("thetaOf2: profile is identically zero");
  }
  const double psiU = psi2(u);
  auto integralHAt = [&](double theta) { return targetH2(u, spec, theta); };
  return solveProjectionTheta(psiU, integralHAt, tolRoot);
}

double halfDomainEnergy(const TauProfile& u, const NonlinearitySpec& spec) {
  requireAdmissible2(u, kAdmissibleSlack, "halfDomainEnergy");
  const BlockRadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  const Eigen::Index m = n - 1;
  const Eigen::ArrayXXd gLow2 =
      u.lowerD1().array().square() + u.lowerD2().array().square();
  const Eigen::ArrayXXd gUp2 =
      u.upperD1().array().square() + u.upperD2().array().square();
  const Eigen::ArrayXXd WLow = lagrangian::densityW(gLow2);
  const Eigen::ArrayXXd WUp = lagrangian::densityW(gUp2);
  double psiHalf = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i < j) continue;
      // The lower triangle of a diagonal cell lies exactly in r1 > r2.
      const double tri = (i == j) ? WLow(i, j) : WLow(i, j) + WUp(i, j);
      psiHalf += 0.5 * tri * grid.cellMass1()[i] * grid.cellMass2()[j];
    }
  }
  psiHalf *= grid.angularFactor();
  double phiHalf = 0.0;
  const Eigen::MatrixXd w2 = weightOuter(grid);
  const Eigen::MatrixXd& U = u.values();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double nodal = w2(i, j) * spec.F(U(i, j));
      phiHalf += (i == j) ? 0.5 * nodal : nodal;
    }
  }
  phiHalf *= grid.angularFactor();
  return psiHalf - phiHalf;
}

namespace {

// Sparse linearized-operator metric, the 2D analog of the radial solver's
// tridiagonal one: exact Hessian of psi2 assembled per triangle over its
// three corner nodes (SPD: the per-triangle blocks have eigenvalues q and
// wp along the triangle gradient, both positive), plus the mass term in
// the positive-mass regime.  The sparsity pattern is fixed, so the
// symbolic factorization is done once and only refactorized numerically.
class OperatorMetric2 {
public:
  explicit OperatorMetric2(const BlockRadialGrid& grid)
      : n_(grid.size()), matrix_(n_ * n_, n_ * n_) {}

  void update(const TauProfile& u, const NonlinearitySpec& spec) {
    const BlockRadialGrid& grid = u.grid();
    const Eigen::Index n = n_;
    const double invH = 1.0 / grid.spacing();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(18 * (n - 1) * (n - 1) + 2 * n));
    auto id = [n](Eigen::Index i, Eigen::Index j) { return i + j * n; };
    auto pinned = [n](Eigen::Index i, Eigen::Index j) {
      return i == n - 1 || j == n - 1;
    };
    // Gradient coefficients w.r.t. the triangle corners, over h.
    static constexpr double bxLow[3] = {-1.0, 1.0, 0.0};
    static constexpr double byLow[3] = {0.0, -1.0, 1.0};
    static constexpr double bxUp[3] = {0.0, -1.0, 1.0};
    static constexpr double byUp[3] = {-1.0, 1.0, 0.0};
    const auto addTriangle = [&](const Eigen::Index node[3],
                                 const bool interior[3], const double bx[3],
                                 const double by[3], double g1, double g2v,
                                 double triScale) {
      const double gg = g1 * g1 + g2v * g2v;
      const double q = 1.0 / std::sqrt(1.0 - gg);
      const double wp = q * q * q;
      // Hessian of W(|g|): q I + (wp - q) g g^T / |g|^2.
      double h11 = q, h22 = q, h12 = 0.0;
      if (gg > 1e-28) {
        const double excess = (wp - q) / gg;
        h11 += excess * g1 * g1;
        h22 += excess * g2v * g2v;
        h12 = excess * g1 * g2v;
      }
      for (int c = 0; c < 3; ++c) {
        if (!interior[c]) continue;
        for (int d = 0; d < 3; ++d) {
          if (!interior[d]) continue;
          const double entry =
              triScale * (h11 * bx[c] * bx[d] + h22 * by[c] * by[d] +
                          h12 * (bx[c] * by[d] + by[c] * bx[d]));
          trips.emplace_back(node[c], node[d], entry);
        }
      }
    };
    for (Eigen::Index b = 0; b + 1 < n; ++b) {
      for (Eigen::Index a = 0; a + 1 < n; ++a) {
        const double triScale = 0.5 * grid.angularFactor() *
                                grid.cellMass1()[a] * grid.cellMass2()[b] *
                                invH * invH;
        const Eigen::Index low[3] = {id(a, b), id(a + 1, b),
                                     id(a + 1, b + 1)};
        const bool lowIn[3] = {!pinned(a, b), !pinned(a + 1, b),
                               !pinned(a + 1, b + 1)};
        addTriangle(low, lowIn, bxLow, byLow, u.lowerD1()(a, b),
                    u.lowerD2()(a, b), triScale);
        const Eigen::Index up[3] = {id(a, b), id(a, b + 1),
                                    id(a + 1, b + 1)};
        const bool upIn[3] = {!pinned(a, b), !pinned(a, b + 1),
                              !pinned(a + 1, b + 1)};
        addTriangle(up, upIn, bxUp, byUp, u.upperD1()(a, b),
                    u.upperD2()(a, b), triScale);
      }
    }
    const bool massTerm = spec.regime == Regime::PositiveMass;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == n - 1 || j == n - 1) {
          trips.emplace_back(id(i, j), id(i, j), 1.0);
        } else if (massTerm) {
          trips.emplace_back(id(i, j), id(i, j),
                             grid.angularFactor() * grid.nodeWeights1()[i] *
                                 grid.nodeWeights2()[j]);
        }
      }
    }
    matrix_.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed_) {
      llt_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    llt_.factorize(matrix_);
    if (llt_.info() != Eigen::Success) {
      throw NumericalFailure("block metric factorization failed");
    }
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    Eigen::VectorXd flat =
        Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
    Eigen::VectorXd out = llt_.solve(flat);
    return Eigen::Map<const Eigen::MatrixXd>(out.data(), n_, n_);
  }

private:
  Eigen::Index n_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  bool analyzed_ = false;
};

// Antisymmetrize and re-impose the Dirichlet box boundary.
Eigen::MatrixXd tauClean(Eigen::MatrixXd vals) {
  const Eigen::Index n = vals.rows();
  vals = 0.5 * (vals - vals.transpose()).eval();
  vals.row(n - 1).setZero();
  vals.col(n - 1).setZero();
  return vals;
}

struct Retracted2 {
  TauProfile profile;
  double alpha = 1.0;
};

// Amplitude retraction onto the discrete manifold: scale the nodal values
// by the alpha solving M(alpha u) = 0.  The dilation scaling theta u(./theta)
// needs resampling, whose interpolation error at block resolutions breaks
// idempotence (re-projecting a projected profile moves it again); a pure
// amplitude scaling is evaluated exactly on the fixed grid, so repeated
// retraction is stable.  The zero set is the same manifold either way.
Retracted2 retractAmplitude(const TauProfile& u, const NonlinearitySpec& spec,
                            double tolRoot, double margin) {
  const BlockRadialGrid& grid = u.grid();
  const Eigen::ArrayXXd gLow =
      (u.lowerD1().array().square() + u.lowerD2().array().square()).sqrt();
  const Eigen::ArrayXXd gUp =
      (u.upperD1().array().square() + u.upperD2().array().square()).sqrt();
  const Eigen::ArrayXXd triW =
      0.5 * grid.angularFactor() *
      (grid.cellMass1().matrix() * grid.cellMass2().matrix().transpose())
          .array();
  const Eigen::ArrayXXd nodeW =
      grid.angularFactor() *
      (grid.nodeWeights1().matrix() * grid.nodeWeights2().matrix().transpose())
          .array();
  const Eigen::ArrayXXd vals = u.values().array();

  const auto residual = [&](double alpha) {
    const auto wAt = [alpha](double t) { return lagrangian::evalW(alpha * t); };
    const double psi = (triW * (gLow.unaryExpr(wAt) + gUp.unaryExpr(wAt))).sum();
    const double target =
        (nodeW * vals.unaryExpr([alpha, &spec](double s) {
          return spec.H(alpha * s);
        })).sum();
    return psi - target;
  };

  const double sup = u.supGradient();
  if (sup <= 0.0) {
    throw DegenerateInputError("retractAmplitude: zero profile");
  }
  const double cap = 0.999999 * (1.0 - margin) / sup;
  double lo = std::min(1.0, cap);
  double hi = lo;
  if (residual(lo) > 0.0) {
    do {
      lo = hi;
      hi = std::min(cap, 2.0 * hi);
      if (hi == lo) {
        throw NoRootError(
            "retractAmplitude: no manifold crossing below the slope cap");
      }
    } while (residual(hi) > 0.0);
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-12) {
        throw NoRootError("retractAmplitude: no manifold crossing above 0");
      }
    } while (residual(lo) <= 0.0);
  }
  while (hi - lo > tolRoot * hi) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  return {TauProfile(u.gridPtr(), tauClean(alpha * u.values())), alpha};
}

void requireOdd(const NonlinearitySpec& spec) {
  for (double s : {0.37, 1.21, 2.83}) {
    const double sum = spec.f(s) + spec.f(-s);
    if (std::abs(sum) > 1e-12 * std::max(1.0, std::abs(spec.f(s)))) {
      throw PreconditionError(
          "minimizeTau: nonlinearity must be odd for the block swap");
    }
  }
}

}  // namespace

TauGroundStateResult minimizeTau(const SolverConfig& config,
                                 const NonlinearitySpec& spec) {
  config.validate();
  if (config.k1 == 0 && config.k2 == 0) {
    throw ConfigurationError("minimizeTau: block factors k1, k2 required");
  }
  if (spec.dimension != config.dimension) {
    throw PreconditionError("minimizeTau: spec dimension mismatch");
  }
  requireOdd(spec);

  const double R = config.effectiveRadius();
  auto grid =
      makeBlockRadialGrid(config.k1, config.k2, R, config.gridNodes);
  const Eigen::Index n = grid->size();

  // Antisymmetric two-bump seed: a bump at (rho, 0) minus its swap.
  const double width = config.initWidth > 0.0 ? config.initWidth : R / 6.0;
  const double amp =
      config.initAmplitude > 0.0 ? config.initAmplitude : 1.2;
  const double rho = R / 3.0;
  Eigen::MatrixXd seed(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r1 = grid->nodes()[i];
      const double r2 = grid->nodes()[j];
      const double bump =
          std::exp(-((r1 - rho) * (r1 - rho) + r2 * r2) / (width * width));
      const double cut =
          (1.0 - (r1 / R) * (r1 / R)) * (1.0 - (r2 / R) * (r2 / R));
      seed(i, j) = amp * bump * cut;
    }
  }
  seed = tauClean(std::move(seed));
  TauProfile u(grid, std::move(seed));
  if (u.maxAbs() == 0.0) {
    throw DegenerateInputError("minimizeTau: seed collapsed to zero");
  }
  if (!u.admissible(config.interiorMargin)) {
    const double shrink =
        (1.0 - config.interiorMargin) / u.supGradient() * 0.999;
    u = TauProfile(grid, u.values() * shrink);
  }

  Retracted2 init =
      retractAmplitude(u, spec, config.tolRoot, config.interiorMargin);
  u = std::move(init.profile);
  TauGroundStateResult result{u};
  result.thetaHistory.push_back(init.alpha);

  OperatorMetric2 metric(*grid);
  metric.update(u, spec);
  double e = functionals2(u, spec).energy;
  Eigen::MatrixXd rawEnergy = gradEnergy2(u, spec, config.interiorMargin);
  Eigen::MatrixXd grad = metric.solve(rawEnergy);
  Eigen::MatrixXd prevValues = u.values();
  Eigen::MatrixXd prevGrad = grad;
  double trialStep = config.stepInitial;
  std::deque<double> window;
  window.push_back(e);

  int iter = 0;
  std::string termination;
  double pgn = 0.0;
  const double acceptSlackScale = 1e-12;
  while (iter < config.maxIterations) {
    const Eigen::MatrixXd rawM =
        gradPohozaev2(u, spec, config.interiorMargin);
    const Eigen::MatrixXd gm = metric.solve(rawM);
    const double ee = (grad.array() * rawEnergy.array()).sum();
    const double em = (grad.array() * rawM.array()).sum();
    const double mm = (gm.array() * rawM.array()).sum();
    pgn = std::sqrt(std::max(0.0, ee - (mm > 0.0 ? em * em / mm : 0.0)));
    if (pgn <= config.tolGradient) {
      termination = "gradient";
      break;
    }
    // Step along the component tangent to the manifold so the scaling
    // reprojection stays near theta = 1.
    Eigen::MatrixXd direction = grad;
    if (mm > 0.0) {
      direction -= (em / mm) * gm;
    }

    bool accepted = false;
    bool capLimited = false;
    double step = trialStep;
    const double acceptSlack =
        acceptSlackScale * std::max(1.0, std::abs(e));
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd cand = tauClean(u.values() - step * direction);
      TauProfile candProfile(grid, std::move(cand));
      if (!candProfile.admissible(config.interiorMargin) ||
          candProfile.maxAbs() == 0.0) {
        capLimited = !candProfile.admissible(config.interiorMargin);
        step *= config.stepShrink;
        continue;
      }
      capLimited = false;
      try {
        Retracted2 proj = retractAmplitude(candProfile, spec, config.tolRoot,
                                           config.interiorMargin);
        const double eNext = functionals2(proj.profile, spec).energy;
        if (std::getenv("BIGS_TRACE_TAU") != nullptr) {
          std::fprintf(stderr,
                       "  iter %d try %d step %.3e alpha %.9f eNext %.12g "
                       "(e %.12g pgn %.3e sup %.3f)\n",
                       iter, tries, step, proj.alpha, eNext, e, pgn,
                       candProfile.supGradient());
        }
        if (eNext <= e + acceptSlack) {
          prevValues = u.values();
          prevGrad = grad;
          u = std::move(proj.profile);
          e = eNext;
          result.thetaHistory.push_back(proj.alpha);
          accepted = true;
          break;
        }
      } catch (const NoRootError&) {
      }
      step *= config.stepShrink;
    }
    ++iter;
    if (!accepted) {
      if (capLimited) {
        std::ostringstream os;
        os << "block descent stalled against the slope cap: max |grad| = "
           << u.supGradient() << ", iteration " << iter;
        throw NumericalFailure(os.str());
      }
      termination = "stall";
      break;
    }

    metric.update(u, spec);
    rawEnergy = gradEnergy2(u, spec, config.interiorMargin);
    grad = metric.solve(rawEnergy);
    const Eigen::MatrixXd s = u.values() - prevValues;
    const Eigen::MatrixXd y = grad - prevGrad;
    const double sy = (s.array() * y.array()).sum();
    const double ss = (s.array() * s.array()).sum();
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

  for (int pass = 0; pass < 30; ++pass) {
    const double resid = std::abs(functionals2(u, spec).pohozaev);
    if (resid <= 0.05 * config.tolPohozaev * std::max(1.0, psi2(u))) break;
    u = retractAmplitude(u, spec, config.tolRoot, config.interiorMargin)
            .profile;
  }

  const BlockFunctionals fin = functionals2(u, spec);
  result.profile = u;
  result.energy = fin.energy;
  result.psiValue = fin.psi;
  result.pohozaevResidual = fin.pohozaev;
  result.supGradient = u.supGradient();
  result.projectedGradientNorm = pgn;
  result.iterations = iter;
  result.termination = termination;
  result.maxDiagonalAbs = u.maxDiagonalAbs();
  result.minValue = u.values().minCoeff();
  result.maxValue = u.values().maxCoeff();
  result.halfRestrictionEnergy = halfDomainEnergy(u, spec);
  return result;
}

void writeBlockCsv(const TauProfile& u, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("writeBlockCsv: cannot open " + path.string());
  }
  out << "r1,r2,u\n";
  char buf[96];
  const Eigen::Index n = u.grid().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                    u.grid().nodes()[i], u.grid().nodes()[j],
                    u.values()(i, j));
      out << buf;
    }
  }
  if (!out.good()) {
    throw Error("writeBlockCsv: write failed for " + path.string());
  }
}

TauProfile readBlockCsv(const std::filesystem::path& path, int k1, int k2) {
  std::ifstream in(path);
  if (!in) {
    throw Error("readBlockCsv: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "r1,r2,u") {
    throw Error("readBlockCsv: expected header r1,r2,u in " + path.string());
  }
  std::vector<double> r1s, r2s, us;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a = 0.0, b = 0.0, c = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) {
      throw Error("readBlockCsv: malformed row '" + line + "'");
    }
    r1s.push_back(a);
    r2s.push_back(b);
    us.push_back(c);
  }
  const auto total = static_cast<Eigen::Index>(us.size());
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(total))));
  if (n < 2 || n * n != total) {
    throw Error("readBlockCsv: row count is not a square grid");
  }
  const double R = r2s[static_cast<std::size_t>(n - 1)];
  auto grid = makeBlockRadialGrid(k1, k2, R, n);
  const double tol = 1e-9 * (R + 1.0);
  Eigen::MatrixXd values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i * n + j);
      if (std::abs(r1s[idx] - grid->nodes()[i]) > tol ||
          std::abs(r2s[idx] - grid->nodes()[j]) > tol) {
        throw Error("readBlockCsv: nodes are not a uniform row-major grid");
      }
      values(i, j) = us[idx];
    }
  }
  return TauProfile(std::move(grid), std::move(values));
}

}  // namespace bigs
