#include "bigs/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bigs/errors.hpp"
#include "bigs/lagrangian.hpp"

namespace bigs {

double sphereArea(int dimension) {
  if (dimension < 1) {
    throw DomainError("sphereArea: dimension must be >= 1, got " +
                      std::to_string(dimension));
  }
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

RadialGrid::RadialGrid(int dimension, double radius, Eigen::Index nodeCount)
    : dimension_(dimension), radius_(radius) {
  if (dimension < 1) {
    throw ConfigurationError("radial grid dimension must be >= 1");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigurationError("radial grid radius must be positive and finite");
  }
  if (nodeCount < 2) {
    throw ConfigurationError("radial grid needs at least 2 nodes");
  }
  const Eigen::Index n = nodeCount;
  spacing_ = radius / static_cast<double>(n - 1);
  sphere_area_ = bigs::sphereArea(dimension);
  nodes_ = Eigen::ArrayXd::LinSpaced(n, 0.0, radius);

  // Cell moments of r^(N-1):  m0 = (b^N - a^N)/N,  m1 = (b^(N+1) - a^(N+1))/(N+1).
  // The hat function weights are the exact integrals of the linear nodal
  // basis against r^(N-1) dr.
  const double N = dimension;
  cell_mass_.resize(n - 1);
  node_weights_ = Eigen::ArrayXd::Zero(n);
  double powA_N = 0.0, powA_N1 = 0.0;  // a^N, a^(N+1) carried across cells
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double a = nodes_[i];
    const double b = nodes_[i + 1];
    const double powB_N = std::pow(b, N);
    const double powB_N1 = std::pow(b, N + 1.0);
    const double m0 = (powB_N - powA_N) / N;
    const double m1 = (powB_N1 - powA_N1) / (N + 1.0);
    cell_mass_[i] = m0;
    node_weights_[i] += (b * m0 - m1) / spacing_;
    node_weights_[i + 1] += (m1 - a * m0) / spacing_;
    powA_N = powB_N;
    powA_N1 = powB_N1;
  }
}

double RadialGrid::integrate(const Eigen::ArrayXd& nodal) const {
  if (nodal.size() != nodes_.size()) {
    throw PreconditionError("integrate: nodal array size mismatch");
  }
  return sphere_area_ * (node_weights_ * nodal).sum();
}

double RadialGrid::integrateCells(const Eigen::ArrayXd& cells) const {
  if (cells.size() != cell_mass_.size()) {
    throw PreconditionError("integrateCells: cell array size mismatch");
  }
  return sphere_area_ * (cell_mass_ * cells).sum();
}

RadialGridPtr makeRadialGrid(int dimension, double radius,
                             Eigen::Index nodeCount) {
  return std::make_shared<const RadialGrid>(dimension, radius, nodeCount);
}

Profile::Profile(RadialGridPtr grid, Eigen::ArrayXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw PreconditionError("Profile: null grid");
  }
  if (values_.size() != grid_->size()) {
    throw PreconditionError("Profile: values size " +
                            std::to_string(values_.size()) +
                            " does not match grid size " +
                            std::to_string(grid_->size()));
  }
  if (!values_.isFinite().all()) {
    throw NumericalFailure("Profile: non-finite nodal value");
  }
  const Eigen::Index n = values_.size();
  derivative_ = (values_.tail(n - 1) - values_.head(n - 1)) / grid_->spacing();
  sup_gradient_ = derivative_.size() ? derivative_.abs().maxCoeff() : 0.0;
}

namespace {

constexpr double kAdmissibleSlack = 1e-12;

void requireAdmissible(const Profile& u, double margin, const char* fn) {
  if (!(u.supGradient() <= 1.0 - margin)) {
    throw ConstraintViolation(
        std::string(fn) + ": profile leaves the admissible set, max |du| = " +
            std::to_string(u.supGradient()) + " > " +
            std::to_string(1.0 - margin),
        u.supGradient());
  }
}

Eigen::ArrayXd nodalMap(const Profile& u,
                        const std::function<double(double)>& fn) {
  const Eigen::ArrayXd& v = u.values();
  Eigen::ArrayXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = fn(v[i]);
  return out;
}

// Signed flux d / sqrt(1 - d^2) per cell.
Eigen::ArrayXd cellFlux(const Profile& u) {
  const Eigen::ArrayXd& d = u.cellDerivative();
  return d / (1.0 - d.square()).sqrt();
}

}  // namespace

double psi(const Profile& u) {
  requireAdmissible(u, kAdmissibleSlack, "psi");
  const Eigen::ArrayXd d2 = u.cellDerivative().square();
  return u.grid().integrateCells(lagrangian::densityW(d2));
}

double phi(const Profile& u, const NonlinearitySpec& spec) {
  return u.grid().integrate(nodalMap(u, spec.F));
}

double phiPrimeU(const Profile& u, const NonlinearitySpec& spec) {
  const Eigen::ArrayXd& v = u.values();
  Eigen::ArrayXd fu(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) fu[i] = spec.f(v[i]) * v[i];
  return u.grid().integrate(fu);
}

double energy(const Profile& u, const NonlinearitySpec& spec) {
  return psi(u) - phi(u, spec);
}

double integralH(const Profile& u, const NonlinearitySpec& spec) {
  return u.grid().integrate(nodalMap(u, spec.H));
}

double pohozaev(const Profile& u, const NonlinearitySpec& spec) {
  return psi(u) - integralH(u, spec);
}

namespace {

// Gradient of Psi through the cell quadrature; last node pinned.
Eigen::ArrayXd gradPsiPinned(const Profile& u) {
  const RadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  const Eigen::ArrayXd flux = cellFlux(u) * grid.cellMass() / grid.spacing();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  out.head(n - 1) -= flux;
  out.segment(1, n - 1) += flux;
  out *= grid.sphereArea();
  out[n - 1] = 0.0;
  return out;
}

}  // namespace

Eigen::ArrayXd gradEnergy(const Profile& u, const NonlinearitySpec& spec,
                          double margin) {
  requireAdmissible(u, margin, "gradEnergy");
  const RadialGrid& grid = u.grid();
  Eigen::ArrayXd out = gradPsiPinned(u);
  const Eigen::Index n = grid.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out[i] -= grid.sphereArea() * grid.nodeWeights()[i] * spec.f(u.values()[i]);
  }
  return out;
}

Eigen::ArrayXd gradPohozaev(const Profile& u, const NonlinearitySpec& spec,
                            double margin) {
  requireAdmissible(u, margin, "gradPohozaev");
  const RadialGrid& grid = u.grid();
  Eigen::ArrayXd out = gradPsiPinned(u);
  const Eigen::Index n = grid.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out[i] -=
        grid.sphereArea() * grid.nodeWeights()[i] * spec.Hprime(u.values()[i]);
  }
  return out;
}

Profile resampleScaled(const Profile& u, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw PreconditionError("resampleScaled: theta must be positive, got " +
                            std::to_string(theta));
  }
  if (theta == 1.0) return u;
  const RadialGrid& grid = u.grid();
  const Eigen::Index n = grid.size();
  const double h = grid.spacing();
  const double R = grid.radius();
  const Eigen::ArrayXd& v = u.values();
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.nodes()[i] / theta;
    if (r > R) {
      out[i] = 0.0;
      continue;
    }
    const auto j = static_cast<Eigen::Index>(r / h);
    const Eigen::Index k = std::min(j, n - 2);
    const double frac = (r - grid.nodes()[k]) / h;
    out[i] = theta * ((1.0 - frac) * v[k] + frac * v[k + 1]);
  }
  return Profile(u.gridPtr(), std::move(out));
}

Profile rearrangeDecreasing(const Profile& u) {
  const Eigen::ArrayXd& v = u.values();
  const double maxV = v.maxCoeff();
  const double minV = v.minCoeff();
  const double scale = std::max(std::abs(maxV), std::abs(minV));
  if (scale == 0.0) return u;
  const double signTol = 1e-14 * scale;
  const bool nonneg = minV >= -signTol;
  const bool nonpos = maxV <= signTol;
  if (!nonneg && !nonpos) {
    throw PreconditionError(
        "rearrangeDecreasing: sign-changing profile (min " +
        std::to_string(minV) + ", max " + std::to_string(maxV) + ")");
  }
  const Eigen::ArrayXd mag = v.abs();
  const Eigen::Index n = v.size();
  const double N = u.grid().dimension();

  // Volume coordinate t = r^N: the measure of a radial set is proportional
  // to its t-length, so rearranging the piecewise linear interpolant in t
  // is an exact layer-cake inversion.
  Eigen::ArrayXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = std::pow(u.grid().nodes()[i], N);

  // Distribution function m(level) = |{t : mag(t) > level}| assembled as a
  // polyline over the descending sorted nodal levels: each nondegenerate
  // segment contributes linearly between its endpoint values, a flat
  // segment contributes a jump.
  struct Event {
    double level;
    double slope;  // d(m)/d(-level) activation
    double step;   // immediate mass
  };
  std::vector<Event> events;
  events.reserve(2 * (n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double va = std::min(mag[i], mag[i + 1]);
    const double vb = std::max(mag[i], mag[i + 1]);
    const double L = t[i + 1] - t[i];
    if (vb > va) {
      const double rate = L / (vb - va);
      events.push_back({vb, rate, 0.0});
      events.push_back({va, -rate, 0.0});
    } else {
      events.push_back({va, 0.0, L});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.level > b.level; });

  // Polyline (level, measure) with level descending, measure nondecreasing.
  std::vector<double> levels, measures;
  levels.reserve(events.size() + 2);
  measures.reserve(events.size() + 2);
  double slope = 0.0;
  double measure = 0.0;
  double prevLevel = mag.maxCoeff();
  levels.push_back(prevLevel);
  measures.push_back(0.0);
  std::size_t k = 0;
  while (k < events.size()) {
    const double level = events[k].level;
    measure += slope * (prevLevel - level);
    levels.push_back(level);
    measures.push_back(measure);
    double step = 0.0;
    while (k < events.size() && events[k].level == level) {
      slope += events[k].slope;
      step += events[k].step;
      ++k;
    }
    if (step > 0.0) {
      measure += step;
      levels.push_back(level);
      measures.push_back(measure);
    }
    prevLevel = level;
  }
  if (prevLevel > 0.0) {
    measure += slope * prevLevel;
    levels.push_back(0.0);
    measures.push_back(measure);
  }

  // Quantile: walk the polyline once while the queries t_j increase.
  Eigen::ArrayXd out(n);
  std::size_t seg = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double query = t[j];
    while (seg + 1 < measures.size() && measures[seg + 1] < query) ++seg;
    if (seg + 1 >= measures.size()) {
      out[j] = 0.0;
      continue;
    }
    const double m0 = measures[seg], m1 = measures[seg + 1];
    const double l0 = levels[seg], l1 = levels[seg + 1];
    if (query <= m0 || m1 == m0) {
      out[j] = l1;
    } else {
      const double frac = (query - m0) / (m1 - m0);
      out[j] = l0 + frac * (l1 - l0);
    }
  }
  out = out.max(0.0);
  out[n - 1] = 0.0;
  if (nonpos && !nonneg) out = -out;
  return Profile(u.gridPtr(), std::move(out));
}

double lpNorm(const Profile& u, double p) {
  if (!(p >= 1.0)) {
    throw DomainError("lpNorm: p must be >= 1, got " + std::to_string(p));
  }
  const Eigen::ArrayXd& v = u.values();
  return std::pow(u.grid().integrate(v.abs().pow(p)), 1.0 / p);
}

double lpNormGradient(const Profile& u, double p) {
  if (!(p >= 1.0)) {
    throw DomainError("lpNormGradient: p must be >= 1");
  }
  return std::pow(u.grid().integrateCells(u.cellDerivative().abs().pow(p)),
                  1.0 / p);
}

void writeProfileCsv(const Profile& u, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("writeProfileCsv: cannot open " + path.string());
  }
  out << "r,u,du\n";
  char buf[96];
  const Eigen::Index n = u.grid().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double du = (i + 1 < n) ? u.cellDerivative()[i] : 0.0;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                  u.grid().nodes()[i], u.values()[i], du);
    out << buf;
  }
  if (!out.good()) {
    throw Error("writeProfileCsv: write failed for " + path.string());
  }
}

Profile readProfileCsv(const std::filesystem::path& path, int dimension) {
  std::ifstream in(path);
  if (!in) {
    throw Error("readProfileCsv: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "r,u,du") {
    throw Error("readProfileCsv: expected header r,u,du in " + path.string());
  }
  std::vector<double> rs, us;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double r = 0.0, uu = 0.0, du = 0.0;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &r, &uu, &du) != 3) {
      throw Error("readProfileCsv: malformed row at line " +
                  std::to_string(lineno) + " of " + path.string());
    }
    rs.push_back(r);
    us.push_back(uu);
  }
  if (rs.size() < 2 || rs.front() != 0.0) {
    throw Error("readProfileCsv: grid must start at r = 0 with >= 2 rows");
  }
  const auto n = static_cast<Eigen::Index>(rs.size());
  const double R = rs.back();
  const double h = R / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(rs[static_cast<std::size_t>(i)] - h * i) > 1e-9 * (R + 1.0)) {
      throw Error("readProfileCsv: nodes are not uniform at row " +
                  std::to_string(i));
    }
  }
  auto grid = makeRadialGrid(dimension, R, n);
  Eigen::ArrayXd values =
      Eigen::Map<const Eigen::ArrayXd>(us.data(), n);
  return Profile(std::move(grid), std::move(values));
}

}  // namespace bigs
