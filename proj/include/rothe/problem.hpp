#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rothe/coefficient_law.hpp"
#include "rothe/grid.hpp"
#include "rothe/kinetics.hpp"

namespace rothe {

struct ConstantDiffusion {
  double value = 1.0;
};

/// D_j(s_j) = floor + d [s_j]_+^p. With floor = 0 the substrate degenerates
/// at s_j = 0, which is only admitted for mobile substrates without flow and
/// with nonnegative data.
struct SubstrateOwnDiffusion {
  double d = 1.0;
  double p = 1.0;
  double floor = 0.0;

  [[nodiscard]] double operator()(double s) const;
  /// Closed-form primitive Phi_j(s) = int_0^s D_j.
  [[nodiscard]] double primitive(double s) const;
  [[nodiscard]] bool degenerate() const { return floor == 0.0; }
};

/// General bounded D_j(m, s) with declared bounds d_min <= D_j <= d_max.
struct MixedDiffusion {
  std::function<double(double m, std::span<const double> s)> fn;
  double d_min = 0.0;
  double d_max = 0.0;
  std::string name;
};

/// D = outside + (inside - outside) clamp(m, 0, 1); a smoothed switch between
/// the void and biofilm values.
MixedDiffusion switch_diffusion(double inside, double outside);

using SubstrateDiffusion =
    std::variant<ConstantDiffusion, SubstrateOwnDiffusion, MixedDiffusion>;

double eval_substrate_diffusion(const SubstrateDiffusion& d, std::size_t j,
                                double m, std::span<const double> s);

struct SubstrateSpec {
  double nu = 0.0;
  SubstrateDiffusion D = ConstantDiffusion{};
  std::array<double, 2> v{0.0, 0.0};
  double h = 0.0;
  Field S0;

  [[nodiscard]] bool mobile() const { return nu > 0.0; }
};

struct DataBounds {
  double M_lo = 0.0;
  double M_hi = 0.0;
  double S_lo = 0.0;
  double S_hi = 0.0;
};

struct ProblemSpec {
  StructuredGrid grid;
  CoefficientLaw law;
  Kinetics kinetics;
  Field M0;
  double h0 = 0.0;
  std::vector<SubstrateSpec> substrates;
  double T = 1.0;

  [[nodiscard]] std::size_t k() const { return substrates.size(); }
  /// essinf/esssup of M0 and min/max over all substrate initial fields.
  [[nodiscard]] DataBounds data_bounds() const;
  /// Sampling box for the kinetics covering the data ranges.
  [[nodiscard]] SamplingBox kinetics_box() const;
  /// Structural checks on data, boundary values, substrate laws and kinetics.
  /// Throws InvalidProblem with a description of the first failure.
  void validate() const;
};

}  // namespace rothe
