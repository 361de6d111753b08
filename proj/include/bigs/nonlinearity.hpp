#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bigs {

enum class Regime { ZeroMass, PositiveMass };

const char* regimeName(Regime regime);
Regime regimeFromName(const std::string& name);

// Pluggable reaction term.  Zero-mass specs provide f, fprime, F; in the
// positive-mass regime f(s) = -s + g(s) and F(s) = -s^2/2 + G(s), with the
// g family stored alongside.  H and Hprime are the scaling densities
// H(s) = F(s) + f(s) s / N used by the manifold projection; factories fill
// them with closed forms, makeCustom derives them from f and F.
struct NonlinearitySpec {
  Regime regime = Regime::ZeroMass;
  int dimension = 3;
  double exponent = 0.0;  // p or q for the built-in power laws, else 0
  std::string name;

  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<double(double)> F;
  std::function<double(double)> H;
  std::function<double(double)> Hprime;

  // Positive-mass regime only.
  std::function<double(double)> g;
  std::function<double(double)> gprime;
  std::function<double(double)> G;

  // h(s) = g(s) s / 2 - G(s); requires the positive-mass family.
  double h(double s) const;
};

// f(s) = |s|^(p-2) s with p > 2N/(N-2), N >= 3.
NonlinearitySpec makePowerZeroMass(int dimension, double p);

// f(s) = -s + |s|^(q-2) s with q > 2, N >= 1.
NonlinearitySpec makePowerPositiveMass(int dimension, double q);

// F(s) = log(1 + s^(2 k0)) with 2 k0 > 2N/(N-2).  Satisfies every zero-mass
// hypothesis except the bound |F| <= C |f s|, whose sampled ratio grows like
// log|s|; kept as a negative control for the audit.
NonlinearitySpec makeLogZeroMass(int dimension, int k0);

// Zero-mass spec from user closures; derives H and Hprime when absent.
NonlinearitySpec makeCustomZeroMass(int dimension, std::string name,
                                    std::function<double(double)> f,
                                    std::function<double(double)> fprime,
                                    std::function<double(double)> F);

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // extremal sampled margin for the check
  std::string detail;
};

struct AuditReport {
  Regime regime = Regime::ZeroMass;
  std::vector<HypothesisCheck> checks;
  double boundConstant = 0.0;  // max sampled |F| / |f s|, zero-mass only
  bool allPass() const;
  const HypothesisCheck* find(const std::string& name) const;
};

// Signed logarithmic sample set covering |s| in [1e-3, 1e3].
std::vector<double> defaultAuditSamples();
// Scale factors t > 1 for the scaling-monotonicity check.
std::vector<double> defaultAuditScales();

AuditReport auditAssumptions(const NonlinearitySpec& spec,
                             const std::vector<double>& samples,
                             const std::vector<double>& scales);
AuditReport auditAssumptions(const NonlinearitySpec& spec);

}  // namespace bigs
