#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bigs/optimizer.hpp"

namespace bigs {

// Flat INI-style config: [section] headers, key = value lines, # comments.
// Sections map one-to-one onto CLI subcommands.  Parse and type errors
// carry the offending line number.
class ConfigFile {
public:
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile fromString(const std::string& text,
                               const std::string& originName = "<string>");

  bool hasSection(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string getString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  double getDouble(const std::string& section, const std::string& key,
                   double fallback) const;
  // "auto" (or a missing key) selects autoValue.
  double getDoubleOrAuto(const std::string& section, const std::string& key,
                         double autoValue) const;
  long long getInt(const std::string& section, const std::string& key,
                   long long fallback) const;
  std::uint64_t getUInt64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
  bool getBool(const std::string& section, const std::string& key,
               bool fallback) const;

  std::vector<std::string> sectionNames() const;  // file order
  std::vector<std::string> keysIn(const std::string& section) const;

  // Unknown keys are configuration errors, reported with their line.
  void requireKnownKeys(const std::string& section,
                        const std::vector<std::string>& allowed) const;
  void requireKnownSections(const std::vector<std::string>& allowed) const;

  const std::string& origin() const { return origin_; }

private:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
  };

  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void badValue(const Entry& e, const char* want) const;

  std::string origin_;
  std::vector<Section> sections_;
};

// Solver keys shared by the solve / audit-sobolev / nonradial sections.
SolverConfig solverConfigFrom(const ConfigFile& config,
                              const std::string& section);
std::vector<std::string> solverKeyNames();

struct ShootRun {
  SolverConfig solver;  // regime, N, exponent, grid
  double sLo = 0.05;
  double sHi = 5.0;
  double stepTarget = 0.0;  // 0 picks the integrator default
};
ShootRun shootRunFrom(const ConfigFile& config);

struct SobolevRun {
  SolverConfig solver;
  int trials = 100;
  double inflate = 1.0;
  // When set, the ground state is taken from a prior solve's artifacts
  // instead of re-solving: `summary` is its JSON (for c), `profile` its CSV
  // (defaults to profile.csv next to the summary).
  std::string summaryPath;
  std::string profilePath;
};
SobolevRun sobolevRunFrom(const ConfigFile& config);

struct NonradialRun {
  SolverConfig solver;  // k1, k2 set; dimension = k1 + k2
  bool doublingCheck = true;
  Eigen::Index radialGridNodes = 0;  // 0: same as the block axis count
};
NonradialRun nonradialRunFrom(const ConfigFile& config);

struct PointChargeRun {
  double b = 1.0;
  double rMax0 = 10.0;
  double tol = 1e-12;
  double tolDoubling = 1e-8;
  int maxDoublings = 60;
};
PointChargeRun pointChargeRunFrom(const ConfigFile& config);

}  // namespace bigs
