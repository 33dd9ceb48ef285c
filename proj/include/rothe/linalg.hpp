#pragma once

#include <span>

#include "rothe/grid.hpp"

namespace rothe::linalg {

struct KrylovStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Thomas algorithm for a one-row Stencil5 (n2 == 1). No pivoting, so the
/// matrix should be diagonally dominant.
Field solve_tridiagonal(const Stencil5& A, std::span<const double> b);

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// A. Stops when ||b - A x||_2 <= tol. `x` holds the initial guess.
KrylovStats pcg(const Stencil5& A, std::span<const double> b, Field& x,
                double tol, int max_iter = 10000);

/// Jacobi-preconditioned BiCGSTAB for nonsymmetric A.
KrylovStats bicgstab(const Stencil5& A, std::span<const double> b, Field& x,
                     double tol, int max_iter = 10000);

/// Direct solve in 1D, PCG (symmetric) or BiCGSTAB otherwise. Throws
/// NonConvergence when the Krylov solver misses `tol`.
Field solve(const Stencil5& A, std::span<const double> b, bool symmetric,
            double tol, std::span<const double> guess = {});

double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

}  // namespace rothe::linalg
