#pragma once

#include <vector>

#include "rothe/elliptic.hpp"
#include "rothe/problem.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

enum class CouplingMode { Banach, Picard };

struct CouplingConfig {
  double theta_c = 0.5;
  double tol_fp = 1e-10;  // L1(Q) distance between successive substrate iterates
  int max_sweeps = 50;
  CouplingMode mode = CouplingMode::Picard;

  void validate() const;
};

/// k C_L t (1 + C_L t exp(C_L t)).
double contraction_growth(double c_l, int k, double t);

/// Largest t with contraction_growth(c_l, k, t) <= theta_c, by bisection.
double contraction_window(double c_l, int k, double theta_c);

/// Window length in steps: the contraction window rounded down to a
/// multiple of tau, at least one step, at most `total`.
int window_steps(double c_l, int k, double theta_c, double tau, int total);

/// Backward-Euler step of a mobile substrate with Dirichlet value h on the
/// whole boundary and upwind advection. D_j(s_j) laws are solved in Kirchhoff
/// form; D_j(m, s) is frozen at (m, s_all). The substrate's own reaction is
/// implicit.
Field step_substrate_pde(const StructuredGrid& g, const SubstrateSpec& sub,
                         std::size_t j, std::span<const double> s_prev,
                         std::span<const double> m, const SubstrateSnapshot& s_all,
                         double tau, const Kinetics& kin,
                         const EllipticConfig& cfg = {});

/// Per-cell backward-Euler step of an immobile substrate.
Field step_substrate_ode(std::size_t j, std::span<const double> s_prev,
                         std::span<const double> m, const SubstrateSnapshot& s_all,
                         double tau, const Kinetics& kin);

struct FixedPointRecord {
  int window = 0;
  int sweep = 0;
  double l1_distance = 0.0;
  double wall_time = 0.0;
};

struct CoupledResult {
  Trajectory M;
  SubstrateHistory S;  // levels 0..steps, matching M
  std::vector<FixedPointRecord> log;
};

/// Windowed fixed-point coupling of the biomass and substrate equations.
/// Throws FixedPointStall when a window does not reach tol_fp.
CoupledResult run_coupled(const ProblemSpec& spec, const TimeGrid& tg,
                          double eps, const CouplingConfig& cc,
                          const EllipticConfig& ec = {},
                          const NewtonObserver& observer = {});

struct CoupledContinuation {
  CoupledResult finest;
  std::vector<double> eps;
  std::vector<double> distances;
  bool non_cauchy = false;
};

CoupledContinuation run_coupled(const ProblemSpec& spec, const TimeGrid& tg,
                                const EpsSchedule& sched,
                                const CouplingConfig& cc,
                                const EllipticConfig& ec = {},
                                const NewtonObserver& observer = {});

/// Rejects banach mode when a mobile substrate has a D_j(m, s) law.
void validate_coupling(const ProblemSpec& spec, const CouplingConfig& cc);

}  // namespace rothe
