#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rothe/grid.hpp"
#include "rothe/kinetics.hpp"
#include "rothe/transforms.hpp"

namespace rothe {

struct EllipticConfig {
  double tol_newton = 1e-12;  // L-infinity bound on the algebraic residual
  int max_iter = 50;
  double damping = 0.5;       // line-search shrink factor
  bool fallback = true;       // damped Picard when Newton stalls

  void validate() const;
};

/// Substrate values at the current time level, one field per substrate.
using SubstrateSnapshot = std::vector<Field>;

/// Called after every accepted iterate with the iteration number, the iterate
/// and its residual norm.
using NewtonObserver =
    std::function<void(int iteration, const Field& u, double residual)>;

struct StepResult {
  Field u;  // Kirchhoff variable
  Field m;  // beta_eps(u)
  int iterations = 0;
  bool used_fallback = false;
  std::vector<double> residuals;  // L-infinity residual per iterate
};

/// Data of one backward-Euler step for the biomass equation.
struct StepData {
  const StructuredGrid& grid;
  const RegularizedTransform& transform;
  const Kinetics& kinetics;
  std::span<const double> m_prev;
  const SubstrateSnapshot& s;
  double tau;
  double h0 = 0.0;  // Dirichlet density on Gamma_1
};

/// R(u) = beta(u) - m_prev + tau L u - tau f0(beta(u), s), L the diffusion
/// operator with ghost value Phi_eps(h0) on Gamma_1.
Field step_residual(const StepData& d, std::span<const double> u);

/// Damped Newton with residual line search, falling back to a damped Picard
/// (L-scheme) iteration. Throws TauTooLarge if tau C_L >= 1 and
/// NonConvergence if both strategies fail.
StepResult solve_time_step(const StepData& d, const EllipticConfig& cfg,
                           std::span<const double> u_guess = {},
                           const NewtonObserver& observer = {});

/// Discrete solution of -Laplace(u) = c_hat with u = 0 on Gamma_1 and zero
/// flux on Gamma_2. Throws SingularSystem when Gamma_1 is empty.
Field solve_poisson_barrier(const StructuredGrid& g, double c_hat);

}  // namespace rothe
