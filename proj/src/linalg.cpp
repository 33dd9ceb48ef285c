#include "rothe/linalg.hpp"

#include <cmath>
#include <string>

#include "rothe/errors.hpp"

namespace rothe::linalg {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Field solve_tridiagonal(const Stencil5& A, std::span<const double> b) {
  const std::size_t n = A.size();
  Field c(n), d(n), x(n);
  double denom = A.diag[0];
  if (denom == 0.0) throw SingularSystem("tridiagonal solve: zero pivot at row 0");
  c[0] = n > 1 ? A.xp[0] / denom : 0.0;
  d[0] = b[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = A.diag[i] - A.xm[i] * c[i - 1];
    if (denom == 0.0) {
      throw SingularSystem("tridiagonal solve: zero pivot at row " +
                           std::to_string(i));
    }
    c[i] = i + 1 < n ? A.xp[i] / denom : 0.0;
    d[i] = (b[i] - A.xm[i] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

KrylovStats pcg(const Stencil5& A, std::span<const double> b, Field& x,
                double tol, int max_iter) {
  const std::size_t n = A.size();
  Field r(n), z(n), p(n), q(n);
  A.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  KrylovStats st;
  st.residual = norm2(r);
  if (st.residual <= tol) return st;
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / A.diag[i];
  p = z;
  double rz = dot(r, z);
  for (st.iterations = 1; st.iterations <= max_iter; ++st.iterations) {
    A.apply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    st.residual = norm2(r);
    if (st.residual <= tol) return st;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / A.diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return st;
}

KrylovStats bicgstab(const Stencil5& A, std::span<const double> b, Field& x,
                     double tol, int max_iter) {
  const std::size_t n = A.size();
  Field r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  A.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r0 = r;
  KrylovStats st;
  st.residual = norm2(r);
  if (st.residual <= tol) return st;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (st.iterations = 1; st.iterations <= max_iter; ++st.iterations) {
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (std::size_t i = 0; i < n; ++i) ph[i] = p[i] / A.diag[i];
    A.apply(ph, v);
    alpha = rho / dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= tol) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
      st.residual = norm2(s);
      return st;
    }
    for (std::size_t i = 0; i < n; ++i) sh[i] = s[i] / A.diag[i];
    A.apply(sh, t);
    omega = dot(t, s) / dot(t, t);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    st.residual = norm2(r);
    if (st.residual <= tol || omega == 0.0) return st;
  }
  return st;
}

Field solve(const Stencil5& A, std::span<const double> b, bool symmetric,
            double tol, std::span<const double> guess) {
  if (A.n2 == 1) return solve_tridiagonal(A, b);
  Field x = guess.empty() ? Field(A.size(), 0.0)
                          : Field(guess.begin(), guess.end());
  const KrylovStats st =
      symmetric ? pcg(A, b, x, tol) : bicgstab(A, b, x, tol);
  if (!(st.residual <= tol)) {
    throw NonConvergence(std::string(symmetric ? "CG" : "BiCGSTAB") +
                         " stalled at residual " + std::to_string(st.residual) +
                         " (target " + std::to_string(tol) + ")");
  }
  return x;
}

}  // namespace rothe::linalg
