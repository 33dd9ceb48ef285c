#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rothe/grid.hpp"
#include "rothe/kinetics.hpp"
#include "rothe/transforms.hpp"

namespace rothe {

/// Sampled curve with derivative values, evaluated by cubic Hermite
/// interpolation between samples.
struct Curve {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> dy;

  [[nodiscard]] double operator()(double time) const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double back() const { return y.back(); }
};

/// RK4 solution of M' = f_max(M), M(0) = M_bar on [0, T]. The step starts at
/// T/1e4 and is halved until the endpoint moves by less than 1e-9.
Curve hat_M(double m_bar, const std::function<double(double)>& f_max, double T);

struct ComparisonCurves {
  std::vector<double> t;
  std::vector<double> checkM, checkS, hatM, hatS;
  /// First times at which checkM / hatM reach 1 - kEtaStop, if they do.
  std::optional<double> check_hit;
  std::optional<double> hat_hit;
};

/// Samples f0(m, .) nondecreasing in s and f1(., s) nonincreasing in m on
/// [0, 1] x [s_lo, s_hi]. Throws MonotonicityViolation.
void check_comparison_hypotheses(const Kinetics& kin, double s_lo, double s_hi);

/// RK4 solution of the four-component comparison system for one substrate,
/// started at (M_lo, S_lo, M_hi, S_hi). Integration stops at T or when checkM
/// reaches 1 - kEtaStop.
ComparisonCurves comparison_system(double m_lo, double s_lo, double m_hi,
                                   double s_hi, const Kinetics& kin, double T);

enum class Verdict { BlowUpPredicted, BoundedBy, Indeterminate };

struct Classification {
  Verdict verdict = Verdict::Indeterminate;
  double value = 0.0;  // t* for BlowUpPredicted, the bound 1 - delta for BoundedBy

  [[nodiscard]] std::string describe() const;
};

struct ClassifyInput {
  std::optional<double> check_hit;  // lower envelope reaches 1 - kEtaStop
  double hat_max = 0.0;             // max of the upper envelope over [0, T]
  double delta_margin = 0.0;
  std::optional<double> barrier_delta;
};

Classification classify(const ClassifyInput& in);

/// 1 - max M_hat, with the maximum taken on the RK4 grid and checked against
/// a halved step to 1e-6.
double delta_margin(const Curve& hat);

struct Barrier {
  double c_hat = 0.0;
  double u_max = 0.0;
  double delta = 0.0;
  Field u_hat;
};

/// C_hat = max f_max(M_hat), u_max = max u_hat + M_bar, delta = 1 - Phi^-1(u_max).
/// Throws SingularSystem if Gamma_1 is empty and RangeError if u_max lies
/// beyond the Kirchhoff table.
Barrier barrier_delta(const StructuredGrid& g, const KirchhoffTransform& phi,
                      const std::function<double(double)>& f_max,
                      const Curve& hat, double m_bar);

/// Blow-up time of the spatially uniform cellulolytic system
/// M' = (S/(1+S) - lambda) M, S' = -S M/(1+S), or nullopt if M stays below 1.
std::optional<double> constant_state_blowup_time(double m_bar, double s_bar,
                                                 double lambda);

}  // namespace rothe
