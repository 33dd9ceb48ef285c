#pragma once

#include "rothe/grid.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

struct RegularityConfig {
  double a = 1.0;
  double alpha = 1.0;
  double eps = 0.0;

  /// alpha = a for a < 2, otherwise 2 - 1e-2.
  static RegularityConfig for_exponent(double a, double eps = 0.0);
  void validate() const;
};

/// Psi_eps(m) = int_1^m 1 / min{max{eps, r^alpha}, 1} dr, in closed form.
double psi_eps(double alpha, double eps, double m);

/// int_1^m Psi_eps(r) dr (nonnegative for every m >= 0).
double psi_eps_primitive(double alpha, double eps, double m);

/// sum_n tau_n sum over interior faces min{M_face^(a - alpha), 1}
/// ((M_i - M_j)/h)^2 h^d, M_face the smaller adjacent value.
double weighted_gradient_functional(const StructuredGrid& g,
                                    const Trajectory& tr, double a,
                                    double alpha);

/// 1 if a < 2 or essinf M0 > 0, otherwise the upper bound 2/a.
double theoretical_exponent(double a, double essinf_m0);

struct FrontFit {
  double gamma = 0.0;
  double r_hat = 0.0;
  double residual = 0.0;  // RMS of the log-log regression
  double front = 0.0;     // fitted front position
  int points = 0;
};

/// Fits M ~ K dist^gamma over cells with M in [1e-4, 1e-1] next to the first
/// interface along the first axis (the middle row in 2D). The front position
/// is chosen to minimise the regression residual between the last empty cell
/// and the first fitted cell. Throws NoFront.
FrontFit fit_front_exponent(const StructuredGrid& g, const Field& m);

/// The same on the stored level closest to t_sample.
FrontFit fit_front_exponent(const StructuredGrid& g, const Trajectory& tr,
                            double t_sample);

}  // namespace rothe
