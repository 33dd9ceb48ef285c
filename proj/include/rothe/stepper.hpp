#pragma once

#include <limits>
#include <vector>

#include "rothe/elliptic.hpp"
#include "rothe/problem.hpp"
#include "rothe/transforms.hpp"

namespace rothe {

/// Integration halts once max M reaches 1 - kEtaStop.
inline constexpr double kEtaStop = 1e-4;

struct TimeGrid {
  double T = 1.0;
  int N = 1;

  [[nodiscard]] double tau() const { return T / N; }
  [[nodiscard]] double t(int n) const { return T * n / N; }
  /// Throws TauTooLarge unless tau C_L < 1.
  void validate(const Kinetics& k) const;
};

/// Substrate snapshots indexed by time level.
using SubstrateHistory = std::vector<SubstrateSnapshot>;

/// Constant-in-time substrate history built from the initial fields.
SubstrateHistory frozen_substrates(const ProblemSpec& spec, int levels);

enum class Interp { Hat, Bar };

struct Trajectory {
  double eps = 0.0;
  std::vector<double> times;
  std::vector<Field> M;
  std::vector<Field> u;
  /// tau ||grad u_n||^2 for n >= 1; entry 0 is zero.
  std::vector<double> energy;
  bool blowup = false;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();
  int newton_iterations = 0;
  int fallbacks = 0;

  [[nodiscard]] std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  [[nodiscard]] double total_energy() const;
};

[[nodiscard]] bool reaches_blowup(std::span<const double> m);

/// Per-step driver for the biomass equation at a fixed regularization.
class RotheStepper {
 public:
  RotheStepper(const ProblemSpec& spec, double eps, EllipticConfig cfg = {});

  [[nodiscard]] const RegularizedTransform& transform() const { return transform_; }
  [[nodiscard]] const ProblemSpec& spec() const { return spec_; }
  [[nodiscard]] const EllipticConfig& config() const { return cfg_; }
  void set_observer(NewtonObserver obs) { observer_ = std::move(obs); }

  [[nodiscard]] StepResult step(std::span<const double> m_prev,
                                const SubstrateSnapshot& s, double tau,
                                std::span<const double> u_guess = {}) const;

  /// ||grad u||^2 including the Gamma_1 ghost value Phi_eps(h0).
  [[nodiscard]] double gradient_norm2(std::span<const double> u) const;

  /// Trajectory holding only the state at time t0.
  [[nodiscard]] Trajectory start(const Field& m0, double t0) const;

  /// Appends the steps at t0 + n tau for n = 1..count, using s[n] as the
  /// substrate state of step n (s[0] belongs to the last stored level).
  /// Stops at the first level with max M >= 1 - kEtaStop, which is flagged
  /// and not stored. `guesses`, if given, supplies Kirchhoff warm starts.
  void advance(Trajectory& tr, const SubstrateHistory& s, int count, double tau,
               const std::vector<Field>* guesses = nullptr) const;

 private:
  const ProblemSpec& spec_;
  RegularizedTransform transform_;
  EllipticConfig cfg_;
  NewtonObserver observer_;
};

/// Rothe scheme for M with the substrates prescribed at every t_n.
Trajectory run_M_given_S(const ProblemSpec& spec, const SubstrateHistory& s,
                         double eps, const TimeGrid& tg,
                         const EllipticConfig& cfg = {});

/// Value of the hat or bar interpolant of the Kirchhoff variable at time t.
Field eval_interpolant(const Trajectory& tr, double t, Interp mode,
                       const RegularizedTransform& r);

struct EpsSchedule {
  std::vector<double> eps;

  static EpsSchedule geometric(double eps0, double ratio, int levels);
  void validate() const;
};

struct ContinuationResult {
  Trajectory finest;
  std::vector<double> eps;
  /// d_k: L1(Q) distance between the trajectories at eps_k and eps_{k+1}.
  std::vector<double> distances;
  bool non_cauchy = false;
};

/// L1(Q) distance sum_n tau ||M_n^a - M_n^b||_L1 over the common steps.
double trajectory_distance(const StructuredGrid& g, const Trajectory& a,
                           const Trajectory& b);

ContinuationResult run_eps_continuation(const ProblemSpec& spec,
                                        const SubstrateHistory& s,
                                        const EpsSchedule& sched,
                                        const TimeGrid& tg,
                                        const EllipticConfig& cfg = {});

}  // namespace rothe
