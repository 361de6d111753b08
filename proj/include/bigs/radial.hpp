#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <memory>

#include "bigs/nonlinearity.hpp"

namespace bigs {

// Surface measure of the unit sphere, 2 pi^(N/2) / Gamma(N/2).
double sphereArea(int dimension);

// Uniform nodes on [0, R] with quadrature for radial integrands against
// r^(N-1) dr.  Nodal weights integrate the piecewise linear interpolant
// exactly (the cell moments of r^(N-1) are closed form), hence they are
// nonnegative and sum to R^N / N exactly; cell masses mu_i carry the
// per-cell measure used by gradient-type integrands.
class RadialGrid {
public:
  RadialGrid(int dimension, double radius, Eigen::Index nodeCount);

  int dimension() const { return dimension_; }
  double radius() const { return radius_; }
  Eigen::Index size() const { return nodes_.size(); }
  double spacing() const { return spacing_; }
  double sphereArea() const { return sphere_area_; }

  const Eigen::ArrayXd& nodes() const { return nodes_; }
  const Eigen::ArrayXd& nodeWeights() const { return node_weights_; }
  const Eigen::ArrayXd& cellMass() const { return cell_mass_; }

  // Integral over R^N of a radial function given by nodal values.
  double integrate(const Eigen::ArrayXd& nodal) const;
  // Same for per-cell values (e.g. densities of the gradient).
  double integrateCells(const Eigen::ArrayXd& cells) const;

private:
  int dimension_;
  double radius_;
  double spacing_;
  double sphere_area_;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd node_weights_;
  Eigen::ArrayXd cell_mass_;
};

using RadialGridPtr = std::shared_ptr<const RadialGrid>;

RadialGridPtr makeRadialGrid(int dimension, double radius,
                             Eigen::Index nodeCount);

// Nodal radial profile.  The discrete admissible set is max_i |d_i| <= 1
// for the forward cell differences d_i = (u_{i+1} - u_i) / h.  The outer
// boundary is a Dirichlet truncation; constructors used by the solver keep
// u(R) = 0, the class itself does not enforce it.
class Profile {
public:
  Profile(RadialGridPtr grid, Eigen::ArrayXd values);

  const RadialGrid& grid() const { return *grid_; }
  const RadialGridPtr& gridPtr() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  const Eigen::ArrayXd& cellDerivative() const { return derivative_; }
  double supGradient() const { return sup_gradient_; }
  bool admissible(double margin = 0.0) const {
    return sup_gradient_ <= 1.0 - margin;
  }
  double maxAbs() const { return values_.abs().maxCoeff(); }

private:
  RadialGridPtr grid_;
  Eigen::ArrayXd values_;
  Eigen::ArrayXd derivative_;
  double sup_gradient_;
};

// Membrane part Psi(u) = integral of 1 - sqrt(1 - |du|^2).
double psi(const Profile& u);
// Potential part Phi(u) = integral of F(u).
double phi(const Profile& u, const NonlinearitySpec& spec);
// Integral of f(u) u.
double phiPrimeU(const Profile& u, const NonlinearitySpec& spec);
// Action I(u) = Psi(u) - Phi(u).
double energy(const Profile& u, const NonlinearitySpec& spec);
// Integral of H(u).
double integralH(const Profile& u, const NonlinearitySpec& spec);
// Manifold residual M(u) = Psi(u) - integral of H(u).
double pohozaev(const Profile& u, const NonlinearitySpec& spec);

// Exact discrete gradients of the quadrature functionals; the last node is
// held fixed (entry zero).  Profiles must keep max |d_i| <= 1 - margin.
Eigen::ArrayXd gradEnergy(const Profile& u, const NonlinearitySpec& spec,
                          double margin = 1e-3);
Eigen::ArrayXd gradPohozaev(const Profile& u, const NonlinearitySpec& spec,
                            double margin = 1e-3);

// u_theta(r) = theta u(r / theta) by linear interpolation, zero beyond the
// support of u; same grid.  For theta > 1 the boundary value is whatever
// theta u(R / theta) is; callers that need the Dirichlet boundary restore
// it themselves.
Profile resampleScaled(const Profile& u, double theta);

// Symmetric decreasing rearrangement of a sign-definite profile, computed
// by exact layer-cake inversion of the piecewise linear representation in
// the volume coordinate t = r^N.
Profile rearrangeDecreasing(const Profile& u);

double lpNorm(const Profile& u, double p);
double lpNormGradient(const Profile& u, double p);

// CSV with header r,u,du; du holds the forward cell difference (0 in the
// last row).  Values are written round-trip exact.
void writeProfileCsv(const Profile& u, const std::filesystem::path& path);
Profile readProfileCsv(const std::filesystem::path& path, int dimension);

}  // namespace bigs
