#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rothe/coupling.hpp"
#include "rothe/elliptic.hpp"
#include "rothe/problem.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

/// A key = value entry with the line it came from.
struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// One [section] block. Repeated substrate blocks each get their own entry.
struct ConfigSection {
  std::string name;
  int line = 0;
  std::map<std::string, ConfigEntry> entries;
};

/// Strict INI-style reader: `[section]` headers, `key = value` lines, `#` or
/// `;` comments. Unknown sections and keys, duplicates and malformed lines
/// raise ConfigError with the offending line number.
std::vector<ConfigSection> parse_config_text(const std::string& text,
                                             const std::string& origin);

struct InitialSpec {
  std::string kind = "constant";  // constant | step | bump | random | file | barenblatt
  std::vector<double> args{0.0};
  std::string path;
};

struct SubstrateConfig {
  double nu = 0.0;
  SubstrateDiffusion D = ConstantDiffusion{};
  bool D_given = false;
  std::array<double, 2> v{0.0, 0.0};
  double h = 0.0;
  InitialSpec S0;
};

struct ScenarioConfig {
  std::string origin = "<config>";
  std::filesystem::path base_dir = ".";

  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> n{32, 32};
  FaceMask gamma1 = kAllNeumann;
  double h0 = 0.0;

  double T = 1.0;
  int N = 100;

  std::vector<double> eps{1e-3};

  std::string preset = "pme";
  std::string law = "";  // singular | power; preset default when empty
  double d2 = 1.0, a = 1.0, b = 1.0;
  EberlConstants eberl;
  double d1 = 1.0;
  double lambda = 0.0;

  std::vector<SubstrateConfig> substrates;
  InitialSpec M0;

  EllipticConfig elliptic;
  CouplingConfig coupling;

  std::string out_dir = "out";
  int snapshots = 0;

  std::string oracle;  // barenblatt | self, for the converge command
  double oracle_t0 = 0.05;
  double oracle_C = 0.0;  // 0 selects a support covering 40% of the domain

  [[nodiscard]] CoefficientLaw make_law() const;
  [[nodiscard]] Kinetics make_kinetics() const;
  [[nodiscard]] TimeGrid time_grid() const { return {T, N}; }
  [[nodiscard]] StructuredGrid make_grid() const;
  /// Builds and validates the problem. Throws InvalidProblem or ConfigError.
  [[nodiscard]] ProblemSpec build_problem() const;
  /// Barenblatt profile used by `M0 = barenblatt` and the converge oracle.
  [[nodiscard]] struct Barenblatt barenblatt() const;
};

ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin = "<config>",
                            const std::filesystem::path& base_dir = ".");

/// Evaluates an initial-data spec on the grid.
Field make_initial_field(const InitialSpec& spec, const StructuredGrid& g,
                         const std::filesystem::path& base_dir,
                         const ScenarioConfig* cfg = nullptr);

}  // namespace rothe
