#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rothe/bounds.hpp"
#include "rothe/config.hpp"

namespace rothe {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBlowUp = 2,
  kExitSolverFailure = 3,
  kExitUsage = 4,
  kExitHypothesis = 5,
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Fixed 17-significant-digit scientific notation; "nan" and "inf" spelled out.
std::string csv_number(double v);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> snapshots;
  bool dump_newton = false;
};

struct BoundsReport {
  DataBounds data;
  Curve envelope;  // hat_M driven by f_max
  std::optional<ComparisonCurves> comparison;
  std::string comparison_note;
  double delta_margin = 0.0;
  std::optional<Barrier> barrier;
  std::string barrier_note;
  Classification classification;
};

/// Envelopes and classification for a validated problem. When `strict`,
/// a failed monotonicity check propagates as MonotonicityViolation;
/// otherwise the comparison section is marked unavailable.
BoundsReport bounds_report(const ProblemSpec& spec, bool strict);

/// Writes bounds_envelope.csv, bounds_comparison.csv (when available) and
/// bounds_classification.csv into `dir`.
void write_bounds_report(const BoundsReport& r, const std::filesystem::path& dir);

enum class Axis { Tau, H, Eps };

Axis parse_axis(const std::string& s);

struct ConvergenceRow {
  int level = 0;
  int n = 0;
  int N = 0;
  double h = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  double error = 0.0;
  double order = 0.0;  // log(e_k/e_{k+1}) / log(step_k/step_{k+1}); nan on the last row
};

struct ConvergenceStudy {
  std::string oracle;
  Axis axis = Axis::H;
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log step over all levels.
  double fitted_order = 0.0;
};

/// Runs the refinement levels in parallel. Barenblatt errors are L1 distances
/// at the final time to the exact profile; self errors are L1 distances
/// between consecutive levels on the coarser grid. Throws OracleUnavailable
/// for the Barenblatt oracle on configs with kinetics or a singular law.
ConvergenceStudy convergence_study(const ScenarioConfig& cfg, Axis axis, int levels);

/// Averages a field onto a grid coarser by an integer factor per axis.
Field restrict_to(const StructuredGrid& fine, const Field& f, const StructuredGrid& coarse);

int cmd_run(const std::filesystem::path& config, const RunOptions& opt, std::ostream& log);
int cmd_bounds(const std::filesystem::path& config, const RunOptions& opt, std::ostream& log);
int cmd_converge(const std::filesystem::path& config, const std::string& axis, int levels,
                 const RunOptions& opt, std::ostream& log);
int cmd_regularity(const std::filesystem::path& config, const RunOptions& opt,
                   std::ostream& log);

}  // namespace rothe
