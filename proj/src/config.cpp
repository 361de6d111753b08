#include "bigs/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bigs/errors.hpp"

namespace bigs {

namespace {

std::string trim(const std::string& s) {
  auto notSpace = [](unsigned char c) { return std::isspace(c) == 0; };
  auto begin = std::find_if(s.begin(), s.end(), notSpace);
  auto end = std::find_if(s.rbegin(), s.rend(), notSpace).base();
  return begin < end ? std::string(begin, end) : std::string();
}

[[noreturn]] void parseError(const std::string& origin, int line,
                             const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw ConfigurationError(os.str());
}

}  // namespace

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError("cannot read config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fromString(buffer.str(), path.string());
}

ConfigFile ConfigFile::fromString(const std::string& text,
                                  const std::string& originName) {
  ConfigFile out;
  out.origin_ = originName;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        parseError(originName, lineNo, "malformed section header '" + line +
                                           "'");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) {
        parseError(originName, lineNo, "empty section name");
      }
      for (const Section& s : out.sections_) {
        if (s.name == name) {
          parseError(originName, lineNo, "duplicate section [" + name + "]");
        }
      }
      out.sections_.push_back({name, lineNo, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      parseError(originName, lineNo, "expected key = value, got '" + line +
                                         "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      parseError(originName, lineNo, "empty key");
    }
    if (out.sections_.empty()) {
      parseError(originName, lineNo,
                 "key '" + key + "' appears before any [section]");
    }
    Section& section = out.sections_.back();
    for (const Entry& e : section.entries) {
      if (e.key == key) {
        parseError(originName, lineNo, "duplicate key '" + key + "' in [" +
                                           section.name + "] (first at line " +
                                           std::to_string(e.line) + ")");
      }
    }
    section.entries.push_back({key, value, lineNo});
  }
  return out;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
  for (const Section& s : sections_) {
    if (s.name != section) continue;
    for (const Entry& e : s.entries) {
      if (e.key == key) return &e;
    }
  }
  return nullptr;
}

void ConfigFile::badValue(const Entry& e, const char* want) const {
  parseError(origin_, e.line,
             "key '" + e.key + "': cannot parse '" + e.value + "' as " +
                 want);
}

bool ConfigFile::hasSection(const std::string& section) const {
  return std::any_of(sections_.begin(), sections_.end(),
                     [&](const Section& s) { return s.name == section; });
}

bool ConfigFile::has(const std::string& section,
                     const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::getString(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigFile::getDouble(const std::string& section,
                             const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const double v = std::strtod(e->value.c_str(), &end);
  if (end != e->value.c_str() + e->value.size() || e->value.empty()) {
    badValue(*e, "a number");
  }
  return v;
}

double ConfigFile::getDoubleOrAuto(const std::string& section,
                                   const std::string& key,
                                   double autoValue) const {
  const Entry* e = find(section, key);
  if (!e || e->value == "auto") return autoValue;
  return getDouble(section, key, autoValue);
}

long long ConfigFile::getInt(const std::string& section,
                             const std::string& key,
                             long long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const long long v = std::strtoll(e->value.c_str(), &end, 10);
  if (end != e->value.c_str() + e->value.size() || e->value.empty()) {
    badValue(*e, "an integer");
  }
  return v;
}

std::uint64_t ConfigFile::getUInt64(const std::string& section,
                                    const std::string& key,
                                    std::uint64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
  if (end != e->value.c_str() + e->value.size() || e->value.empty() ||
      e->value.front() == '-') {
    badValue(*e, "an unsigned integer");
  }
  return v;
}

bool ConfigFile::getBool(const std::string& section, const std::string& key,
                         bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const std::string& v = e->value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  badValue(*e, "a boolean (true/false)");
}

std::vector<std::string> ConfigFile::sectionNames() const {
  std::vector<std::string> out;
  out.reserve(sections_.size());
  for (const Section& s : sections_) out.push_back(s.name);
  return out;
}

std::vector<std::string> ConfigFile::keysIn(const std::string& section) const {
  std::vector<std::string> out;
  for (const Section& s : sections_) {
    if (s.name != section) continue;
    for (const Entry& e : s.entries) out.push_back(e.key);
  }
  return out;
}

void ConfigFile::requireKnownKeys(
    const std::string& section, const std::vector<std::string>& allowed) const {
  for (const Section& s : sections_) {
    if (s.name != section) continue;
    for (const Entry& e : s.entries) {
      if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
        parseError(origin_, e.line,
                   "unknown key '" + e.key + "' in [" + section + "]");
      }
    }
  }
}

void ConfigFile::requireKnownSections(
    const std::vector<std::string>& allowed) const {
  for (const Section& s : sections_) {
    if (std::find(allowed.begin(), allowed.end(), s.name) == allowed.end()) {
      parseError(origin_, s.line, "unknown section [" + s.name + "]");
    }
  }
}

namespace {

Regime regimeFrom(const ConfigFile& config, const std::string& section) {
  const std::string name = config.getString(section, "regime", "zero-mass");
  return regimeFromName(name);
}

}  // namespace

std::vector<std::string> solverKeyNames() {
  return {"regime",        "N",
          "exponent",      "grid_n",
          "grid_r",        "max_iterations",
          "interior_margin", "step_initial",
          "step_shrink",   "tol_energy_stall",
          "stall_window",  "tol_gradient",
          "tol_pohozaev",  "tol_root",
          "init_amplitude", "init_width",
          "multi_start",   "seed",
          "k1",            "k2"};
}

SolverConfig solverConfigFrom(const ConfigFile& config,
                              const std::string& section) {
  SolverConfig out;
  out.regime = regimeFrom(config, section);
  out.dimension = static_cast<int>(config.getInt(section, "N", 3));
  out.exponent = config.getDouble(section, "exponent", 8.0);
  out.gridNodes = static_cast<Eigen::Index>(
      config.getInt(section, "grid_n", out.gridNodes));
  out.gridRadius = config.getDoubleOrAuto(section, "grid_r", 0.0);
  out.maxIterations = static_cast<int>(
      config.getInt(section, "max_iterations", out.maxIterations));
  out.interiorMargin =
      config.getDouble(section, "interior_margin", out.interiorMargin);
  out.stepInitial = config.getDouble(section, "step_initial", out.stepInitial);
  out.stepShrink = config.getDouble(section, "step_shrink", out.stepShrink);
  out.tolEnergyStall =
      config.getDouble(section, "tol_energy_stall", out.tolEnergyStall);
  out.stallWindow = static_cast<int>(
      config.getInt(section, "stall_window", out.stallWindow));
  out.tolGradient = config.getDouble(section, "tol_gradient", out.tolGradient);
  out.tolPohozaev = config.getDouble(section, "tol_pohozaev", out.tolPohozaev);
  out.tolRoot = config.getDouble(section, "tol_root", out.tolRoot);
  out.initAmplitude =
      config.getDoubleOrAuto(section, "init_amplitude", 0.0);
  out.initWidth = config.getDoubleOrAuto(section, "init_width", 0.0);
  out.multiStart = static_cast<int>(
      config.getInt(section, "multi_start", out.multiStart));
  out.seed = config.getUInt64(section, "seed", out.seed);
  out.k1 = static_cast<int>(config.getInt(section, "k1", 0));
  out.k2 = static_cast<int>(config.getInt(section, "k2", 0));
  return out;
}

ShootRun shootRunFrom(const ConfigFile& config) {
  const std::string section = "shoot";
  ShootRun out;
  out.solver = solverConfigFrom(config, section);
  if (!config.has(section, "grid_n")) out.solver.gridNodes = 2001;
  out.sLo = config.getDouble(section, "s_lo", out.sLo);
  out.sHi = config.getDouble(section, "s_hi", out.sHi);
  out.stepTarget = config.getDouble(section, "step", out.stepTarget);
  return out;
}

SobolevRun sobolevRunFrom(const ConfigFile& config) {
  const std::string section = "audit-sobolev";
  SobolevRun out;
  out.solver = solverConfigFrom(config, section);
  out.trials = static_cast<int>(config.getInt(section, "trials", out.trials));
  out.inflate = config.getDouble(section, "inflate", out.inflate);
  out.summaryPath = config.getString(section, "summary", "");
  out.profilePath = config.getString(section, "profile", "");
  if (out.profilePath.empty() && !out.summaryPath.empty()) {
    out.profilePath = (std::filesystem::path(out.summaryPath)
                           .parent_path() /
                       "profile.csv")
                          .string();
  }
  return out;
}

NonradialRun nonradialRunFrom(const ConfigFile& config) {
  const std::string section = "nonradial";
  NonradialRun out;
  out.solver = solverConfigFrom(config, section);
  if (!config.has(section, "grid_n")) out.solver.gridNodes = 201;
  if (!config.has(section, "k1")) out.solver.k1 = 2;
  if (!config.has(section, "k2")) out.solver.k2 = 2;
  if (!config.has(section, "N")) {
    out.solver.dimension = out.solver.k1 + out.solver.k2;
  }
  out.doublingCheck = config.getBool(section, "doubling_check", true);
  out.radialGridNodes = static_cast<Eigen::Index>(
      config.getInt(section, "radial_grid_n", 0));
  return out;
}

PointChargeRun pointChargeRunFrom(const ConfigFile& config) {
  const std::string section = "pointcharge";
  PointChargeRun out;
  out.b = config.getDouble(section, "b", out.b);
  out.rMax0 = config.getDouble(section, "r_max", out.rMax0);
  out.tol = config.getDouble(section, "tol", out.tol);
  out.tolDoubling =
      config.getDouble(section, "tol_doubling", out.tolDoubling);
  out.maxDoublings = static_cast<int>(
      config.getInt(section, "max_doublings", out.maxDoublings));
  return out;
}

}  // namespace bigs
