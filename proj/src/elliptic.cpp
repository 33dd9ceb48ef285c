#include "rothe/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"
#include "rothe/linalg.hpp"

namespace rothe {

void EllipticConfig::validate() const {
  if (!(tol_newton > 0.0)) throw ConfigError("tol_newton must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw ConfigError("damping must lie in (0, 1)");
  }
}

namespace {

constexpr double kFdIncrement = 1e-7;
constexpr int kMaxHalvings = 30;

class StepSystem {
 public:
  explicit StepSystem(const StepData& d)
      : d_(d),
        op_(diffusion_operator(d.grid, d.grid.gamma1(),
                               d.transform.phi(d.h0))),
        svec_(d.s.size()) {}

  const StepData& data() const { return d_; }
  const AffineOperator& op() const { return op_; }

  void load(std::size_t i) {
    for (std::size_t j = 0; j < svec_.size(); ++j) svec_[j] = d_.s[j][i];
  }

  // Fills m = beta(u) and the residual.
  void residual(std::span<const double> u, Field& m, Field& r) {
    const std::size_t n = u.size();
    m.resize(n);
    r = op_.apply(u);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = d_.transform.beta(u[i]);
      load(i);
      r[i] = m[i] - d_.m_prev[i] + d_.tau * r[i] -
             d_.tau * d_.kinetics.rate0(m[i], svec_);
    }
  }

  // Diagonal of the Jacobian of the pointwise part, floored at the
  // monotonicity margin eps (1 - tau C_L).
  Field jacobian_diagonal(std::span<const double> m) {
    const double eps = d_.transform.eps();
    const double floor = eps * (1.0 - d_.tau * d_.kinetics.lipschitz);
    Field diag(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      load(i);
      const double f = d_.kinetics.rate0(m[i], svec_);
      const double df = (d_.kinetics.rate0(m[i] + kFdIncrement, svec_) - f) /
                        kFdIncrement;
      const double dbeta = 1.0 / d_.transform.dphi(m[i]);
      diag[i] = std::max(dbeta * (1.0 - d_.tau * df), floor);
    }
    return diag;
  }

  Field solve_linear(const Field& diag, const Field& rhs) {
    Stencil5 J = op_.A;
    J.scale(d_.tau);
    J.add_diagonal(diag);
    if (J.n2 == 1) return linalg::solve_tridiagonal(J, rhs);
    Field x(rhs.size(), 0.0);
    const double tol = std::max(1e-10 * linalg::norm2(rhs), 1e-300);
    linalg::pcg(J, rhs, x, tol);
    for (double v : x) {
      if (!std::isfinite(v)) throw NonConvergence("CG produced non-finite update");
    }
    return x;
  }

 private:
  const StepData& d_;
  AffineOperator op_;
  std::vector<double> svec_;
};

double l1(const Field& r) {
  double s = 0.0;
  for (double v : r) s += std::abs(v);
  return s;
}

}  // namespace

Field step_residual(const StepData& d, std::span<const double> u) {
  StepSystem sys(d);
  Field m, r;
  sys.residual(u, m, r);
  return r;
}

StepResult solve_time_step(const StepData& d, const EllipticConfig& cfg,
                           std::span<const double> u_guess,
                           const NewtonObserver& observer) {
  cfg.validate();
  if (d.tau * d.kinetics.lipschitz >= 1.0) {
    std::ostringstream msg;
    msg << "time step tau = " << d.tau << " violates tau < 1/C_L = "
        << 1.0 / d.kinetics.lipschitz;
    throw TauTooLarge(msg.str());
  }
  require_finite(d.m_prev, "previous density");
  StepSystem sys(d);
  StepResult out;
  const std::size_t n = d.m_prev.size();
  Field u(n);
  if (u_guess.empty()) {
    for (std::size_t i = 0; i < n; ++i) u[i] = d.transform.phi(d.m_prev[i]);
  } else {
    u.assign(u_guess.begin(), u_guess.end());
  }
  Field m, r, m_try, r_try, u_try(n);
  sys.residual(u, m, r);
  double rnorm = linalg::norm_inf(r);
  out.residuals.push_back(rnorm);
  if (observer) observer(0, u, rnorm);

  auto finish = [&]() {
    require_finite(u, "time-step solution");
    out.u = std::move(u);
    out.m = std::move(m);
    return out;
  };
  if (rnorm <= cfg.tol_newton) return finish();

  bool stalled = false;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    const Field delta = sys.solve_linear(sys.jacobian_diagonal(m), rhs);
    const double base = l1(r);
    double lambda = 1.0;
    int halvings = 0;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) u_try[i] = u[i] + lambda * delta[i];
      sys.residual(u_try, m_try, r_try);
      const double trial = linalg::norm_inf(r_try);
      if (std::isfinite(trial) && (l1(r_try) < base || trial <= cfg.tol_newton)) {
        break;
      }
      if (++halvings > kMaxHalvings) break;
      lambda *= cfg.damping;
    }
    if (halvings > kMaxHalvings) {
      stalled = true;
      break;
    }
    std::swap(u, u_try);
    std::swap(m, m_try);
    std::swap(r, r_try);
    rnorm = linalg::norm_inf(r);
    out.iterations = it;
    out.residuals.push_back(rnorm);
    if (observer) observer(it, u, rnorm);
    if (rnorm <= cfg.tol_newton) return finish();
  }

  if (cfg.fallback) {
    // L-scheme: the shift bounds the derivative of the pointwise part, so
    // every iterate decreases the error in the monotone norm.
    out.used_fallback = true;
    const double lam = (1.0 + d.tau * d.kinetics.lipschitz) / d.transform.eps();
    const Field shift(n, lam);
    const int picard_iters = 200 * cfg.max_iter;
    for (int it = 1; it <= picard_iters; ++it) {
      Field rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
      const Field delta = sys.solve_linear(shift, rhs);
      for (std::size_t i = 0; i < n; ++i) u[i] += delta[i];
      sys.residual(u, m, r);
      rnorm = linalg::norm_inf(r);
      ++out.iterations;
      out.residuals.push_back(rnorm);
      if (observer) observer(out.iterations, u, rnorm);
      if (rnorm <= cfg.tol_newton) return finish();
    }
  }
  std::ostringstream msg;
  msg << "time step did not converge: residual " << rnorm << " > "
      << cfg.tol_newton << (stalled ? " (line search stalled)" : "")
      << " after " << out.iterations << " iterations";
  throw NonConvergence(msg.str());
}

Field solve_poisson_barrier(const StructuredGrid& g, double c_hat) {
  if (g.gamma1_empty()) {
    throw SingularSystem("barrier problem needs a nonempty Dirichlet part");
  }
  const AffineOperator op = diffusion_operator(g, g.gamma1(), 0.0);
  const Field b(g.cells(), c_hat);
  if (c_hat == 0.0) return Field(g.cells(), 0.0);
  return linalg::solve(op.A, b, true, 1e-13 * linalg::norm2(b));
}

}  // namespace rothe
