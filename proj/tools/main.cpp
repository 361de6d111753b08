// Command-line front door: config parsing, subcommand dispatch, CSV/JSON
// artifacts.  Exit codes: 0 all checks pass, 1 runtime or numerical
// failure (including failed checks), 2 configuration error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bigs/config.hpp"
#include "bigs/errors.hpp"
#include "bigs/nonlinearity.hpp"
#include "bigs/nonradial.hpp"
#include "bigs/optimizer.hpp"
#include "bigs/pointcharge.hpp"
#include "bigs/radial.hpp"
#include "bigs/shooting.hpp"
#include "bigs/sobolev.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kSections = {
    "solve", "shoot", "audit-sobolev", "nonradial", "pointcharge"};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

Check leqCheck(std::string name, double value, double tolerance) {
  const bool ok = std::isfinite(value) && value <= tolerance;
  return {std::move(name), value, tolerance, ok};
}

Check strictlyBelow(std::string name, double value, double bound) {
  const bool ok = std::isfinite(value) && value < bound;
  return {std::move(name), value, bound, ok};
}

Check strictlyAbove(std::string name, double value, double bound) {
  const bool ok = std::isfinite(value) && value > bound;
  return {std::move(name), value, bound, ok};
}

ordered_json checksJson(const std::vector<Check>& checks) {
  ordered_json arr = ordered_json::array();
  for (const Check& c : checks) {
    ordered_json row;
    row["name"] = c.name;
    row["value"] = c.value;
    row["tolerance"] = c.tolerance;
    row["pass"] = c.pass;
    arr.push_back(std::move(row));
  }
  return arr;
}

bool allPass(const std::vector<Check>& checks) {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ordered_json configEcho(const bigs::ConfigFile& config) {
  ordered_json sections;
  for (const std::string& name : config.sectionNames()) {
    ordered_json body;
    for (const std::string& key : config.keysIn(name)) {
      body[key] = config.getString(name, key, "");
    }
    sections[name] = std::move(body);
  }
  return sections;
}

struct Options {
  std::string configPath;
  std::string outDir = "out";
  std::optional<std::uint64_t> seed;
  bool checkOnly = false;
};

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

ordered_json summaryShell(const std::string& subcommand,
                          const bigs::ConfigFile& config,
                          std::uint64_t seed) {
  ordered_json out;
  out["subcommand"] = subcommand;
  out["version"] = kVersion;
  ordered_json cfg;
  cfg["file"] = config.origin();
  cfg["sections"] = configEcho(config);
  cfg["seed"] = seed;
  out["config"] = std::move(cfg);
  return out;
}

void writeSummary(const std::filesystem::path& outDir,
                  const ordered_json& summary) {
  std::filesystem::create_directories(outDir);
  std::ofstream out(outDir / "summary.json");
  if (!out) {
    throw bigs::Error("cannot write " + (outDir / "summary.json").string());
  }
  out << summary.dump(2) << "\n";
}

int finish(const std::string& subcommand, ordered_json& summary,
           const std::vector<Check>& checks,
           const std::vector<std::string>& warnings,
           const std::filesystem::path& outDir, const Stopwatch& clock) {
  const bool pass = allPass(checks);
  summary["checks"] = checksJson(checks);
  summary["warnings"] = warnings;
  summary["pass"] = pass;
  summary["wall_time_s"] = clock.seconds();
  writeSummary(outDir, summary);
  for (const std::string& w : warnings) {
    std::cerr << subcommand << ": warning: " << w << "\n";
  }
  for (const Check& c : checks) {
    if (!c.pass) {
      std::cerr << subcommand << ": check failed: " << c.name << " = "
                << c.value << " (tolerance " << c.tolerance << ")\n";
    }
  }
  std::cout << subcommand << ": " << (pass ? "pass" : "FAIL") << ", summary "
            << (outDir / "summary.json").string() << "\n";
  return pass ? 0 : 1;
}

bigs::ConfigFile loadConfig(const Options& opts) {
  bigs::ConfigFile config = bigs::ConfigFile::load(opts.configPath);
  config.requireKnownSections(kSections);
  return config;
}

std::vector<std::string> withKeys(std::vector<std::string> base,
                                  std::initializer_list<const char*> extra) {
  for (const char* k : extra) base.emplace_back(k);
  return base;
}

void validateSection(const bigs::ConfigFile& config,
                     const std::string& section) {
  if (section == "solve") {
    config.requireKnownKeys(section, bigs::solverKeyNames());
    bigs::SolverConfig sc = bigs::solverConfigFrom(config, section);
    sc.validate();
    sc.makeSpec();
  } else if (section == "shoot") {
    config.requireKnownKeys(
        section, {"regime", "N", "exponent", "grid_n", "grid_r", "s_lo",
                  "s_hi", "step"});
    bigs::ShootRun run = bigs::shootRunFrom(config);
    run.solver.validate();
    run.solver.makeSpec();
    if (!(run.sLo > 0.0 && run.sHi > run.sLo)) {
      throw bigs::ConfigurationError("shoot: need 0 < s_lo < s_hi");
    }
  } else if (section == "audit-sobolev") {
    config.requireKnownKeys(
        section, withKeys(bigs::solverKeyNames(),
                          {"trials", "inflate", "summary", "profile"}));
    bigs::SobolevRun run = bigs::sobolevRunFrom(config);
    run.solver.validate();
    run.solver.makeSpec();
    if (run.solver.regime != bigs::Regime::ZeroMass) {
      throw bigs::ConfigurationError(
          "audit-sobolev: the inequality is stated for the zero-mass "
          "power nonlinearity");
    }
    if (run.trials < 0 || !(run.inflate > 0.0)) {
      throw bigs::ConfigurationError(
          "audit-sobolev: trials must be >= 0 and inflate > 0");
    }
  } else if (section == "nonradial") {
    config.requireKnownKeys(
        section, withKeys(bigs::solverKeyNames(),
                          {"doubling_check", "radial_grid_n"}));
    bigs::NonradialRun run = bigs::nonradialRunFrom(config);
    run.solver.validate();
    run.solver.makeSpec();
    if (run.doublingCheck && run.solver.k1 != run.solver.k2) {
      throw bigs::ConfigurationError(
          "nonradial: the energy-doubling comparison is defined only "
          "when k1=k2");
    }
  } else if (section == "pointcharge") {
    config.requireKnownKeys(
        section, {"b", "r_max", "tol", "tol_doubling", "max_doublings"});
    bigs::PointChargeRun run = bigs::pointChargeRunFrom(config);
    if (!(run.b > 0.0)) {
      throw bigs::ConfigurationError("pointcharge: b must be > 0");
    }
  }
}

int runSolve(const Options& opts) {
  Stopwatch clock;
  bigs::ConfigFile config = loadConfig(opts);
  validateSection(config, "solve");
  bigs::SolverConfig sc = bigs::solverConfigFrom(config, "solve");
  if (opts.seed) sc.seed = *opts.seed;
  sc.validate();
  const bigs::NonlinearitySpec spec = sc.makeSpec();
  if (opts.checkOnly) {
    std::cout << "solve: config OK\n";
    return 0;
  }

  bigs::MultiStartReport report =
      bigs::multiStart(sc, spec, sc.multiStart);
  const bigs::GroundStateResult& g = report.best;
  const double psi = g.psiValue;
  const double identity =
      bigs::phiPrimeU(g.profile, spec) / sc.dimension;
  const double mn = g.profile.values().minCoeff();
  const double mx = g.profile.values().maxCoeff();
  const double scale = std::max(g.profile.maxAbs(), 1e-300);
  const double mixedSign =
      std::min(std::max(-mn, 0.0), std::max(mx, 0.0)) / scale;

  std::vector<Check> checks;
  checks.push_back(leqCheck("pohozaev-residual",
                            std::abs(g.pohozaevResidual),
                            sc.tolPohozaev * std::max(1.0, psi)));
  checks.push_back(strictlyBelow("sup-gradient", g.supGradient, 1.0));
  checks.push_back(strictlyAbove("energy-positive", g.energy, 0.0));
  checks.push_back(leqCheck(
      "energy-identity",
      std::abs(g.energy - identity) / std::max(1.0, std::abs(g.energy)),
      1e-6));
  checks.push_back(leqCheck("sign-constant", mixedSign, 1e-9));
  checks.push_back(leqCheck("radially-monotone", g.monotone ? 0.0 : 1.0,
                            0.5));
  if (sc.multiStart > 1) {
    checks.push_back(leqCheck("multi-start-spread", report.spread, 1e-4));
  }

  std::vector<std::string> warnings;
  for (const std::string& name : g.auditWarnings) {
    warnings.push_back("hypothesis check failed: " + name);
  }
  if (g.tailWarning) {
    warnings.push_back(
        "slow decay at the truncation radius, tail ratio = " +
        std::to_string(g.tailRatio) + "; consider a larger grid_r");
  }
  for (const std::string& m : report.failureMessages) {
    warnings.push_back("start failed: " + m);
  }

  const std::filesystem::path outDir(opts.outDir);
  std::filesystem::create_directories(outDir);
  bigs::writeProfileCsv(g.profile, outDir / "profile.csv");

  ordered_json summary = summaryShell("solve", config, sc.seed);
  ordered_json results;
  results["c"] = g.energy;
  results["psi"] = psi;
  results["pohozaev_residual"] = g.pohozaevResidual;
  results["sup_gradient"] = g.supGradient;
  results["projected_gradient_norm"] = g.projectedGradientNorm;
  results["iterations"] = g.iterations;
  results["termination"] = g.termination;
  results["sign"] = bigs::signClassName(g.sign);
  results["monotone"] = g.monotone;
  results["tail_ratio"] = g.tailRatio;
  results["theta_final"] =
      g.thetaHistory.empty() ? 1.0 : g.thetaHistory.back();
  results["energy_identity_value"] = identity;
  results["multi_start_energies"] = report.energies;
  results["multi_start_spread"] = report.spread;
  results["grid_r"] = g.profile.grid().radius();
  results["grid_n"] = g.profile.grid().size();
  summary["results"] = std::move(results);
  return finish("solve", summary, checks, warnings, outDir, clock);
}

int runShoot(const Options& opts) {
  Stopwatch clock;
  bigs::ConfigFile config = loadConfig(opts);
  validateSection(config, "shoot");
  bigs::ShootRun run = bigs::shootRunFrom(config);
  run.solver.validate();
  const bigs::NonlinearitySpec spec = run.solver.makeSpec();
  if (opts.checkOnly) {
    std::cout << "shoot: config OK\n";
    return 0;
  }

  auto grid = bigs::makeRadialGrid(run.solver.dimension,
                                   run.solver.effectiveRadius(),
                                   run.solver.gridNodes);
  bigs::ShootResult shot = bigs::findGround(spec, grid, run.sLo, run.sHi,
                                            run.stepTarget);

  std::vector<Check> checks;
  checks.push_back(leqCheck(
      "classification-decays",
      shot.classification == bigs::ShotClass::Decays ? 0.0 : 1.0, 0.5));
  checks.push_back(
      strictlyBelow("sup-gradient", shot.profile.supGradient(), 1.0));
  checks.push_back(leqCheck(
      "pohozaev-residual", std::abs(shot.pohozaevResidual),
      0.02 * std::max(1.0, shot.psiValue)));

  const std::filesystem::path outDir(opts.outDir);
  std::filesystem::create_directories(outDir);
  bigs::writeProfileCsv(shot.profile, outDir / "shot.csv");

  ordered_json summary = summaryShell("shoot", config, run.solver.seed);
  ordered_json results;
  results["s_star"] = shot.initialHeight;
  results["classification"] = bigs::shotClassName(shot.classification);
  results["energy"] = shot.energy;
  results["psi"] = shot.psiValue;
  results["pohozaev_residual"] = shot.pohozaevResidual;
  results["terminal_value"] = shot.terminalValue;
  results["stop_radius"] = shot.stopRadius;
  results["grid_r"] = grid->radius();
  results["grid_n"] = grid->size();
  summary["results"] = std::move(results);
  return finish("shoot", summary, checks, {}, outDir,
                clock);
}

int runAuditSobolev(const Options& opts) {
  Stopwatch clock;
  bigs::ConfigFile config = loadConfig(opts);
  validateSection(config, "audit-sobolev");
  bigs::SobolevRun run = bigs::sobolevRunFrom(config);
  if (opts.seed) run.solver.seed = *opts.seed;
  run.solver.validate();
  const bigs::NonlinearitySpec spec = run.solver.makeSpec();
  if (opts.checkOnly) {
    std::cout << "audit-sobolev: config OK\n";
    return 0;
  }

  std::vector<std::string> warnings;
  double groundEnergy = 0.0;
  std::optional<bigs::Profile> ground;
  if (!run.summaryPath.empty()) {
    std::ifstream in(run.summaryPath);
    if (!in) {
      throw bigs::ConfigurationError("audit-sobolev: cannot read summary " +
                                     run.summaryPath);
    }
    ordered_json prior = ordered_json::parse(in);
    if (!prior.contains("results") || !prior["results"].contains("c")) {
      throw bigs::ConfigurationError(
          "audit-sobolev: prior summary has no results.c field");
    }
    groundEnergy = prior["results"]["c"].get<double>();
    ground = bigs::readProfileCsv(run.profilePath, run.solver.dimension);
  } else {
    bigs::GroundStateResult g = bigs::minimize(run.solver, spec);
    groundEnergy = g.energy;
    for (const std::string& name : g.auditWarnings) {
      warnings.push_back("hypothesis check failed: " + name);
    }
    ground = std::move(g.profile);
  }

  bigs::SobolevAudit audit =
      bigs::sobolevAudit(*ground, spec, groundEnergy, run.trials,
                         run.solver.seed, run.inflate);

  std::vector<Check> checks;
  if (run.inflate > 1.0) {
    // Negative control: the inflated constant must be violated at the
    // ground state.
    checks.push_back(strictlyBelow("inflated-constant-violated",
                                   audit.groundMargin, 0.0));
  } else {
    checks.push_back(leqCheck(
        "ground-ratio-matches-constant",
        std::abs(audit.groundRatio - audit.constant) / audit.constant,
        5e-3));
    checks.push_back(leqCheck("violations",
                              static_cast<double>(audit.violations), 0.0));
  }

  const std::filesystem::path outDir(opts.outDir);
  ordered_json summary =
      summaryShell("audit-sobolev", config, run.solver.seed);
  ordered_json results;
  results["c"] = audit.groundEnergy;
  results["constant"] = audit.constant;
  results["inflate"] = run.inflate;
  results["ground_ratio"] = audit.groundRatio;
  results["ground_margin"] = audit.groundMargin;
  results["min_ratio"] = audit.minRatio;
  results["trials"] = audit.trials.size();
  results["violations"] = audit.violations;
  summary["results"] = std::move(results);
  return finish("audit-sobolev", summary, checks, warnings, outDir, clock);
}

int runNonradial(const Options& opts) {
  Stopwatch clock;
  bigs::ConfigFile config = loadConfig(opts);
  validateSection(config, "nonradial");
  bigs::NonradialRun run = bigs::nonradialRunFrom(config);
  if (opts.seed) run.solver.seed = *opts.seed;
  run.solver.validate();
  const bigs::NonlinearitySpec spec = run.solver.makeSpec();
  if (opts.checkOnly) {
    std::cout << "nonradial: config OK\n";
    return 0;
  }

  bigs::TauGroundStateResult tau = bigs::minimizeTau(run.solver, spec);

  std::vector<Check> checks;
  checks.push_back(leqCheck(
      "pohozaev-residual", std::abs(tau.pohozaevResidual),
      run.solver.tolPohozaev * std::max(1.0, tau.psiValue)));
  checks.push_back(strictlyBelow("sup-gradient", tau.supGradient, 1.0));
  checks.push_back(strictlyAbove("energy-positive", tau.energy, 0.0));
  checks.push_back(strictlyBelow("min-value-negative", tau.minValue, 0.0));
  checks.push_back(strictlyAbove("max-value-positive", tau.maxValue, 0.0));
  checks.push_back(
      leqCheck("diagonal-vanishing", tau.maxDiagonalAbs, 1e-12));
  if (run.solver.k1 == run.solver.k2) {
    checks.push_back(leqCheck(
        "half-restriction-energy",
        std::abs(tau.halfRestrictionEnergy - 0.5 * tau.energy) /
            std::max(1.0, std::abs(tau.energy)),
        1e-10));
  }

  ordered_json results;
  results["c_tau"] = tau.energy;
  results["psi"] = tau.psiValue;
  results["pohozaev_residual"] = tau.pohozaevResidual;
  results["sup_gradient"] = tau.supGradient;
  results["projected_gradient_norm"] = tau.projectedGradientNorm;
  results["iterations"] = tau.iterations;
  results["termination"] = tau.termination;
  results["max_diagonal_abs"] = tau.maxDiagonalAbs;
  results["min_value"] = tau.minValue;
  results["max_value"] = tau.maxValue;
  results["half_restriction_energy"] = tau.halfRestrictionEnergy;

  if (run.doublingCheck) {
    bigs::SolverConfig radial = run.solver;
    radial.k1 = 0;
    radial.k2 = 0;
    if (run.radialGridNodes > 0) radial.gridNodes = run.radialGridNodes;
    bigs::GroundStateResult ref = bigs::minimize(radial, spec);
    const double margin = tau.energy - 2.0 * ref.energy;
    results["radial_c"] = ref.energy;
    results["doubling_margin"] = margin;
    checks.push_back(strictlyAbove("energy-doubling-margin", margin, 0.0));
  }

  const std::filesystem::path outDir(opts.outDir);
  std::filesystem::create_directories(outDir);
  bigs::writeBlockCsv(tau.profile, outDir / "block_profile.csv");

  ordered_json summary = summaryShell("nonradial", config, run.solver.seed);
  summary["results"] = std::move(results);
  return finish("nonradial", summary, checks, {}, outDir,
                clock);
}

int runPointCharge(const Options& opts) {
  Stopwatch clock;
  bigs::ConfigFile config = loadConfig(opts);
  validateSection(config, "pointcharge");
  bigs::PointChargeRun run = bigs::pointChargeRunFrom(config);
  if (opts.checkOnly) {
    std::cout << "pointcharge: config OK\n";
    return 0;
  }

  bigs::PointChargeResult sweep = bigs::pointChargeSweep(
      run.b, run.rMax0, run.tolDoubling, run.maxDoublings, run.tol);

  std::vector<Check> checks;
  checks.push_back(leqCheck("rmax-doubling-delta",
                            sweep.doublingDelta / std::abs(sweep.energy),
                            run.tolDoubling));
  double scalingError = 0.0;
  if (run.b != 1.0) {
    bigs::PointChargeResult unit = bigs::pointChargeSweep(
        1.0, run.rMax0, run.tolDoubling, run.maxDoublings, run.tol);
    scalingError = std::abs(sweep.energy -
                            std::pow(run.b, 1.5) * unit.energy) /
                   std::abs(sweep.energy);
  }
  checks.push_back(leqCheck("scaling-law", scalingError,
                            std::max(1e-6, 10.0 * run.tolDoubling)));

  const std::filesystem::path outDir(opts.outDir);
  ordered_json summary = summaryShell("pointcharge", config, 0);
  ordered_json results;
  results["b"] = sweep.b;
  results["energy"] = sweep.energy;
  results["r_max"] = sweep.rMax;
  results["doubling_delta"] = sweep.doublingDelta;
  ordered_json table = ordered_json::array();
  for (const bigs::DoublingRow& row : sweep.table) {
    ordered_json entry;
    entry["r_max"] = row.rMax;
    entry["energy"] = row.energy;
    table.push_back(std::move(entry));
  }
  results["table"] = std::move(table);
  summary["results"] = std::move(results);
  return finish("pointcharge", summary, checks, {}, outDir,
                clock);
}

int runCheckOnly(const Options& opts) {
  bigs::ConfigFile config = loadConfig(opts);
  for (const std::string& section : config.sectionNames()) {
    validateSection(config, section);
  }
  std::cout << "check-only: config OK (" << config.origin() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Born-Infeld ground states by manifold-constrained descent"};
  app.require_subcommand(1);

  Options opts;
  auto addCommon = [&opts](CLI::App* cmd) {
    cmd->add_option("--config", opts.configPath, "Config file (INI-style)")
        ->required();
    cmd->add_option("--out", opts.outDir, "Output directory (default ./out)");
    cmd->add_option("--seed", opts.seed,
                    "Override the config seed (unsigned 64-bit)");
    cmd->add_flag("--check-only", opts.checkOnly,
                  "Validate the config and exit");
  };

  addCommon(app.add_subcommand(
      "solve", "Ground state by descent over the scaling manifold"));
  addCommon(app.add_subcommand(
      "shoot", "Radial shooting cross-check for the ground state"));
  addCommon(app.add_subcommand(
      "audit-sobolev", "Sobolev-type inequality audit at the ground level"));
  addCommon(app.add_subcommand(
      "nonradial", "Block-radial antisymmetric minimizer and doubling"));
  addCommon(app.add_subcommand(
      "pointcharge", "Finite energy of the point-charge field"));
  addCommon(app.add_subcommand(
      "check-only", "Validate every section of a config file"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("solve")) return runSolve(opts);
    if (app.got_subcommand("shoot")) return runShoot(opts);
    if (app.got_subcommand("audit-sobolev")) return runAuditSobolev(opts);
    if (app.got_subcommand("nonradial")) return runNonradial(opts);
    if (app.got_subcommand("pointcharge")) return runPointCharge(opts);
    if (app.got_subcommand("check-only")) return runCheckOnly(opts);
  } catch (const bigs::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const bigs::PreconditionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const bigs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
