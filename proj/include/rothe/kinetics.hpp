#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rothe {

using RateFn = std::function<double(double m, std::span<const double> s)>;

/// Reaction terms f0 (biomass) and f_j (substrates) with the data the
/// analysis needs: an upper envelope f_max >= f0(., s) and a Lipschitz
/// bound C_L valid for every partial difference quotient.
///
/// Rates are extended outside m in [0, 1] by freezing m at the nearest end
/// point, which preserves both C_L and the f_max bound.
struct Kinetics {
  std::string name;
  RateFn f0;
  std::vector<RateFn> fj;
  std::function<double(double)> f_max;
  double lipschitz = 0.0;

  [[nodiscard]] std::size_t substrates() const { return fj.size(); }
  [[nodiscard]] double rate0(double m, std::span<const double> s) const;
  [[nodiscard]] double rate(std::size_t j, double m,
                            std::span<const double> s) const;
  [[nodiscard]] double fmax(double m) const { return f_max(m); }
};

/// Constants of the dissolved-substrate biofilm model.
struct EberlConstants {
  double k1 = 1.0;
  double k2 = 0.1;
  double k3 = 1.0;
  double k4 = 1.0;
};

/// f0 = k3 s m/(k4+s) - k2 m, f1 = -k1 s m/(k4+s). Extra substrates are passive.
Kinetics eberl2001_kinetics(const EberlConstants& c, std::size_t substrates = 1);

/// Non-dimensional cellulolytic kinetics f0 = (s/(1+s) - lambda) m,
/// f1 = -s m/(1+s). Extra substrates are passive.
Kinetics cellulolytic2017_kinetics(double lambda, std::size_t substrates = 1);

Kinetics zero_kinetics(std::size_t substrates = 0);

/// Ranges sampled for (m, s_1, ..., s_k).
struct SamplingBox {
  std::pair<double, double> m{0.0, 1.0};
  std::vector<std::pair<double, double>> s;
  int points_per_axis = 33;
};

/// Largest axis-aligned difference quotient of f0 and every f_j on a grid.
double estimate_lipschitz(const Kinetics& k, const SamplingBox& box);

/// Samples the structural requirements: f0(0, s) >= 0, f0 <= f_max and
/// difference quotients <= C_L (1 + 1e-6). Throws InvalidProblem.
void validate_kinetics(const Kinetics& k, const SamplingBox& box);

}  // namespace rothe
