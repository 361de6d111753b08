#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bigs/optimizer.hpp"

namespace bigs {

// Tensor grid for block-radial functions u(|x1|, |x2|) on R^(k1) x R^(k2),
// truncated to the box [0, R]^2.  Each axis carries the same hat-function
// quadrature as the radial grid, with weight r^(k-1).
class BlockRadialGrid {
public:
  BlockRadialGrid(int k1, int k2, double radius, Eigen::Index nodesPerAxis);

  int k1() const { return axis1_.dimension(); }
  int k2() const { return axis2_.dimension(); }
  int dimension() const { return k1() + k2(); }
  double radius() const { return axis1_.radius(); }
  Eigen::Index size() const { return axis1_.size(); }
  double spacing() const { return axis1_.spacing(); }
  double angularFactor() const { return angular_; }

  const Eigen::ArrayXd& nodes() const { return axis1_.nodes(); }
  const Eigen::ArrayXd& nodeWeights1() const { return axis1_.nodeWeights(); }
  const Eigen::ArrayXd& nodeWeights2() const { return axis2_.nodeWeights(); }
  const Eigen::ArrayXd& cellMass1() const { return axis1_.cellMass(); }
  const Eigen::ArrayXd& cellMass2() const { return axis2_.cellMass(); }

  // Integral over the block cylinder of a nodal density u(i, j).
  double integrate(const Eigen::MatrixXd& nodal) const;

private:
  RadialGrid axis1_;
  RadialGrid axis2_;
  double angular_;
};

using BlockRadialGridPtr = std::shared_ptr<const BlockRadialGrid>;

BlockRadialGridPtr makeBlockRadialGrid(int k1, int k2, double radius,
                                       Eigen::Index nodesPerAxis);

// Nodal values u(i, j) = u(r1_i, r2_j).  Each cell is split along its main
// diagonal into two triangles with piecewise-linear gradients: a plain
// 2x2 average of forward differences would annihilate the checkerboard
// mode, letting nodal mass accumulate at zero gradient cost.  The main
// diagonal is swap-invariant, so the split respects the tau symmetry.
// Admissibility is sqrt(d1^2 + d2^2) <= 1 per triangle.
class TauProfile {
public:
  TauProfile(BlockRadialGridPtr grid, Eigen::MatrixXd values);

  const BlockRadialGrid& grid() const { return *grid_; }
  const BlockRadialGridPtr& gridPtr() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  // Gradient components on the triangle below the cell diagonal (corners
  // u00, u10, u11) and above it (corners u00, u01, u11).
  const Eigen::MatrixXd& lowerD1() const { return lower1_; }
  const Eigen::MatrixXd& lowerD2() const { return lower2_; }
  const Eigen::MatrixXd& upperD1() const { return upper1_; }
  const Eigen::MatrixXd& upperD2() const { return upper2_; }
  double supGradient() const { return sup_gradient_; }
  bool admissible(double margin = 0.0) const {
    return sup_gradient_ <= 1.0 - margin;
  }
  double maxAbs() const;
  double maxDiagonalAbs() const;

private:
  BlockRadialGridPtr grid_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd lower1_, lower2_, upper1_, upper2_;
  double sup_gradient_;
};

// The block swap involution (tau u)(r1, r2) = -u(r2, r1); requires k1 = k2.
Eigen::MatrixXd tauApply(const Eigen::MatrixXd& values);
// Projection (u - u^T)/2 onto the tau-fixed (antisymmetric) subspace.
TauProfile tauProject(const BlockRadialGridPtr& grid,
                      const Eigen::MatrixXd& values);

struct BlockFunctionals {
  double psi = 0.0;
  double phi = 0.0;
  double phiPrimeU = 0.0;
  double energy = 0.0;
  double pohozaev = 0.0;
};

BlockFunctionals functionals2(const TauProfile& u,
                              const NonlinearitySpec& spec);
double psi2(const TauProfile& u);
double integralH2(const TauProfile& u, const NonlinearitySpec& spec);
double targetH2(const TauProfile& u, const NonlinearitySpec& spec,
                double theta);
Eigen::MatrixXd gradEnergy2(const TauProfile& u, const NonlinearitySpec& spec,
                            double margin = 1e-3);
Eigen::MatrixXd gradPohozaev2(const TauProfile& u,
                              const NonlinearitySpec& spec,
                              double margin = 1e-3);
TauProfile resampleScaled2(const TauProfile& u, double theta);
ProjectionResult thetaOf2(const TauProfile& u, const NonlinearitySpec& spec,
                          double tolRoot = 1e-12);

// Action restricted to the half domain r1 > r2 (diagonal cells at half
// weight); equals I(u)/2 for tau-fixed u up to discretization.
double halfDomainEnergy(const TauProfile& u, const NonlinearitySpec& spec);

struct TauGroundStateResult {
  explicit TauGroundStateResult(TauProfile p) : profile(std::move(p)) {}

  TauProfile profile;
  double energy = 0.0;
  double psiValue = 0.0;
  double pohozaevResidual = 0.0;
  double supGradient = 0.0;
  double projectedGradientNorm = 0.0;
  int iterations = 0;
  std::string termination;
  std::vector<double> thetaHistory;
  double maxDiagonalAbs = 0.0;
  double minValue = 0.0;
  double maxValue = 0.0;
  double halfRestrictionEnergy = 0.0;
};

// Least-energy tau-fixed state by the same projected descent as the radial
// solver.  Uses config.dimension = k1 + k2; the nonlinearity must be odd.
// k1 != k2 is accepted here; the energy-doubling comparison is only
// meaningful when k1 = k2.
TauGroundStateResult minimizeTau(const SolverConfig& config,
                                 const NonlinearitySpec& spec);

// CSV with header r1,r2,u in row-major order (r1 outer).
void writeBlockCsv(const TauProfile& u, const std::filesystem::path& path);
TauProfile readBlockCsv(const std::filesystem::path& path, int k1, int k2);

}  // namespace bigs
