#include "rothe/coupling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"
#include "rothe/linalg.hpp"
#include "rothe/numerics.hpp"

namespace rothe {

void CouplingConfig::validate() const {
  if (!(theta_c > 0.0 && theta_c < 1.0)) throw ConfigError("theta_c must lie in (0, 1)");
  if (!(tol_fp > 0.0)) throw ConfigError("tol_fp must be positive");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be at least 1");
}

double contraction_growth(double c_l, int k, double t) {
  const double ct = c_l * t;
  return k * ct * (1.0 + ct * std::exp(ct));
}

double contraction_window(double c_l, int k, double theta_c) {
  if (!(c_l > 0.0) || k < 1) {
    throw DomainError("contraction window needs C_L > 0 and k >= 1");
  }
  double hi = 1.0 / c_l;
  while (contraction_growth(c_l, k, hi) <= theta_c) hi *= 2.0;
  return numerics::bisect_increasing(
      [&](double t) { return contraction_growth(c_l, k, t) - theta_c; }, 0.0, hi);
}

int window_steps(double c_l, int k, double theta_c, double tau, int total) {
  if (k < 1 || c_l == 0.0) return total;
  const double dt = contraction_window(c_l, k, theta_c);
  const int steps = static_cast<int>(std::floor(dt / tau * (1.0 + 1e-12)));
  return std::clamp(steps, 1, total);
}

namespace {

constexpr double kFd = 1e-7;

double l1(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += std::abs(v);
  return s;
}

// Column scaling A -> A diag(c).
Stencil5 scale_columns(const Stencil5& A, std::span<const double> c) {
  Stencil5 B = A;
  const auto w = static_cast<std::size_t>(A.n1);
  for (int j = 0; j < A.n2; ++j) {
    for (int i = 0; i < A.n1; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) + w * static_cast<std::size_t>(j);
      B.diag[k] *= c[k];
      if (i > 0) B.xm[k] *= c[k - 1];
      if (i + 1 < A.n1) B.xp[k] *= c[k + 1];
      if (j > 0) B.ym[k] *= c[k - w];
      if (j + 1 < A.n2) B.yp[k] *= c[k + w];
    }
  }
  return B;
}

}  // namespace

Field step_substrate_pde(const StructuredGrid& g, const SubstrateSpec& sub,
                         std::size_t j, std::span<const double> s_prev,
                         std::span<const double> m, const SubstrateSnapshot& s_all,
                         double tau, const Kinetics& kin,
                         const EllipticConfig& cfg) {
  if (!sub.mobile()) throw InvalidProblem("step_substrate_pde needs nu > 0");
  const std::size_t n = g.cells();
  const std::size_t k = s_all.size();
  const auto* own = std::get_if<SubstrateOwnDiffusion>(&sub.D);

  AffineOperator diff;
  if (own) {
    diff = diffusion_operator(g, kAllDirichlet, own->primitive(sub.h));
  } else if (const auto* c = std::get_if<ConstantDiffusion>(&sub.D)) {
    const Field coeff(n, c->value);
    diff = diffusion_operator(g, kAllDirichlet, sub.h, coeff);
  } else {
    Field coeff(n);
    std::vector<double> sv(k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < k; ++q) sv[q] = s_all[q][i];
      coeff[i] = eval_substrate_diffusion(sub.D, j, m[i], sv);
    }
    diff = diffusion_operator(g, kAllDirichlet, sub.h, coeff);
  }
  const FaceVelocity vel = uniform_velocity(g, {-sub.v[0], -sub.v[1]});
  const bool has_flow = max_speed(vel) > 0.0;
  AffineOperator adv;
  if (has_flow) adv = advection_operator(g, vel, kAllDirichlet, sub.h);
  const bool symmetric = !has_flow && !own;
  const double tn = tau * sub.nu;

  std::vector<double> sv(k);
  auto load = [&](std::size_t i, double sj) {
    for (std::size_t q = 0; q < k; ++q) sv[q] = s_all[q][i];
    sv[j] = sj;
  };
  auto transform = [&](std::span<const double> s) {
    Field x(s.begin(), s.end());
    if (own) {
      for (double& v : x) v = own->primitive(v);
    }
    return x;
  };
  auto residual = [&](std::span<const double> s) {
    Field r = diff.apply(transform(s));
    if (has_flow) {
      const Field a = adv.apply(s);
      for (std::size_t i = 0; i < n; ++i) r[i] += a[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      load(i, s[i]);
      r[i] = s[i] - s_prev[i] + tn * r[i] - tau * kin.rate(j, m[i], sv);
    }
    return r;
  };

  Field s(s_prev.begin(), s_prev.end());
  Field r = residual(s);
  double rnorm = linalg::norm_inf(r);
  for (int it = 0; it < 4 * cfg.max_iter && rnorm > cfg.tol_newton; ++it) {
    Field dx(n, 1.0);
    if (own) {
      for (std::size_t i = 0; i < n; ++i) dx[i] = (*own)(s[i]);
    }
    Stencil5 J = own ? scale_columns(diff.A, dx) : diff.A;
    if (has_flow) J.add(adv.A);
    J.scale(tn);
    Field diag(n);
    for (std::size_t i = 0; i < n; ++i) {
      load(i, s[i]);
      const double f = kin.rate(j, m[i], sv);
      sv[j] = s[i] + kFd;
      diag[i] = 1.0 - tau * (kin.rate(j, m[i], sv) - f) / kFd;
    }
    J.add_diagonal(diag);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    const Field delta = linalg::solve(J, rhs, symmetric,
                                      std::max(1e-12 * linalg::norm2(rhs), 1e-300));
    const double base = l1(r);
    double lambda = 1.0;
    Field trial(n), rt;
    for (int h = 0;; ++h) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = s[i] + lambda * delta[i];
      rt = residual(trial);
      if (l1(rt) < base || linalg::norm_inf(rt) <= cfg.tol_newton) break;
      if (h >= 30) {
        throw NonConvergence("substrate " + std::to_string(j + 1) +
                             " step: line search stalled at residual " +
                             std::to_string(rnorm));
      }
      lambda *= cfg.damping;
    }
    s = std::move(trial);
    r = std::move(rt);
    rnorm = linalg::norm_inf(r);
  }
  if (rnorm > cfg.tol_newton) {
    throw NonConvergence("substrate " + std::to_string(j + 1) +
                         " step did not converge, residual " + std::to_string(rnorm));
  }
  require_finite(s, "substrate step");
  return s;
}

Field step_substrate_ode(std::size_t j, std::span<const double> s_prev,
                         std::span<const double> m, const SubstrateSnapshot& s_all,
                         double tau, const Kinetics& kin) {
  const std::size_t n = s_prev.size();
  const std::size_t k = s_all.size();
  std::vector<double> sv(k);
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < k; ++q) sv[q] = s_all[q][i];
    auto g = [&](double s) {
      sv[j] = s;
      return s - s_prev[i] - tau * kin.rate(j, m[i], sv);
    };
    double s = s_prev[i];
    double gs = g(s);
    bool done = false;
    for (int it = 0; it < 60; ++it) {
      const double tol = 1e-15 * (1.0 + std::abs(s));
      if (std::abs(gs) <= tol) {
        done = true;
        break;
      }
      const double dg = (g(s + kFd) - gs) / kFd;
      const double next = s - gs / dg;
      if (!std::isfinite(next)) break;
      const double gn = g(next);
      if (std::abs(gn) >= std::abs(gs) && std::abs(next - s) <= 1e-15 * (1.0 + std::abs(s))) {
        done = true;  // stagnated at rounding level
        break;
      }
      s = next;
      gs = gn;
    }
    if (!done) {
      // g is strictly increasing (slope >= 1 - tau C_L > 0): bracket and bisect.
      double lo = s_prev[i] - 1.0;
      double hi = s_prev[i] + 1.0;
      for (int e = 0; e < 200 && g(lo) > 0.0; ++e) lo -= 2.0 * (hi - lo);
      for (int e = 0; e < 200 && g(hi) < 0.0; ++e) hi += 2.0 * (hi - lo);
      if (!(g(lo) <= 0.0 && g(hi) >= 0.0)) {
        throw NonConvergence("immobile substrate " + std::to_string(j + 1) +
                             ": no bracket at cell " + std::to_string(i));
      }
      s = numerics::bisect_increasing(g, lo, hi);
    }
    out[i] = s;
  }
  return out;
}

void validate_coupling(const ProblemSpec& spec, const CouplingConfig& cc) {
  cc.validate();
  if (cc.mode != CouplingMode::Banach) return;
  for (std::size_t j = 0; j < spec.k(); ++j) {
    const auto& sub = spec.substrates[j];
    if (sub.mobile() && std::holds_alternative<MixedDiffusion>(sub.D)) {
      throw ConfigError("banach mode needs D_j = D_j(S_j) or nu_j = 0; substrate " +
                        std::to_string(j + 1) + " has D(m, s)");
    }
  }
}

namespace {

double history_distance(const StructuredGrid& g, const SubstrateHistory& a,
                        const SubstrateHistory& b, std::size_t levels, double tau) {
  double d = 0.0;
  for (std::size_t n = 1; n < levels; ++n) {
    for (std::size_t q = 0; q < a[n].size(); ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < a[n][q].size(); ++i) s += std::abs(a[n][q][i] - b[n][q][i]);
      d += tau * s * g.cell_volume();
    }
  }
  return d;
}

}  // namespace

CoupledResult run_coupled(const ProblemSpec& spec, const TimeGrid& tg, double eps,
                          const CouplingConfig& cc, const EllipticConfig& ec,
                          const NewtonObserver& observer) {
  validate_coupling(spec, cc);
  tg.validate(spec.kinetics);
  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
        .count();
  };
  const double tau = tg.tau();
  const int k = static_cast<int>(spec.k());
  RotheStepper stepper(spec, eps, ec);
  if (observer) stepper.set_observer(observer);
  CoupledResult out;
  out.M = stepper.start(spec.M0, 0.0);
  SubstrateSnapshot s0;
  for (const auto& sub : spec.substrates) s0.push_back(sub.S0);
  out.S.push_back(s0);

  if (k == 0) {
    stepper.advance(out.M, SubstrateHistory(static_cast<std::size_t>(tg.N + 1)), tg.N, tau);
    out.S.resize(out.M.M.size());
    return out;
  }

  const int per_window = window_steps(spec.kinetics.lipschitz, k, cc.theta_c, tau, tg.N);
  int level = 0;
  int window = 0;
  while (level < tg.N) {
    int steps = std::min(per_window, tg.N - level);
    ++window;
    // Initial guess: the substrates frozen at the window start.
    SubstrateHistory guess(static_cast<std::size_t>(steps + 1), out.S.back());
    Trajectory wm;
    SubstrateHistory fresh;
    bool converged = false;
    for (int sweep = 1; sweep <= cc.max_sweeps; ++sweep) {
      wm = stepper.start(out.M.M.back(), out.M.times.back());
      stepper.advance(wm, guess, steps, tau);
      if (wm.blowup) {
        const int reached = static_cast<int>(wm.steps());
        if (reached == 0) {
          // Blow-up within one step of the window start.
          if (steps == 1) {
            out.M.blowup = true;
            out.M.blowup_time = wm.blowup_time;
            out.M.newton_iterations += wm.newton_iterations;
            out.log.push_back({window, sweep, 0.0, elapsed()});
            return out;
          }
          steps = 1;
        } else {
          steps = reached;
        }
        guess.resize(static_cast<std::size_t>(steps + 1));
        --sweep;  // the shortened window starts its sweep count afresh
        if (sweep < 0) sweep = 0;
        continue;
      }
      // Gauss-Seidel over substrates in index order.
      fresh.assign(static_cast<std::size_t>(steps + 1), guess[0]);
      for (int n = 1; n <= steps; ++n) {
        fresh[static_cast<std::size_t>(n)] = guess[static_cast<std::size_t>(n)];
        SubstrateSnapshot& cur = fresh[static_cast<std::size_t>(n)];
        const SubstrateSnapshot& prev = fresh[static_cast<std::size_t>(n - 1)];
        const Field& m = wm.M[static_cast<std::size_t>(n)];
        for (int j = 0; j < k; ++j) {
          const auto ju = static_cast<std::size_t>(j);
          const auto& sub = spec.substrates[ju];
          cur[ju] = sub.mobile()
                        ? step_substrate_pde(spec.grid, sub, ju, prev[ju], m, cur,
                                             tau, spec.kinetics, ec)
                        : step_substrate_ode(ju, prev[ju], m, cur, tau, spec.kinetics);
        }
      }
      const double d = history_distance(spec.grid, fresh, guess,
                                        static_cast<std::size_t>(steps + 1), tau);
      out.log.push_back({window, sweep, d, elapsed()});
      guess = fresh;
      if (d <= cc.tol_fp) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "fixed point stalled in window " << window << " at t = "
          << out.M.times.back() << ": distance " << out.log.back().l1_distance
          << " > " << cc.tol_fp << " after " << cc.max_sweeps << " sweeps";
      throw FixedPointStall(msg.str());
    }
    // The accepted M was computed from the previous iterate, the substrates
    // from that M; at convergence the two differ by at most tol_fp.
    for (std::size_t n = 1; n < wm.M.size(); ++n) {
      out.M.times.push_back(wm.times[n]);
      out.M.M.push_back(std::move(wm.M[n]));
      out.M.u.push_back(std::move(wm.u[n]));
      out.M.energy.push_back(wm.energy[n]);
      out.S.push_back(std::move(fresh[n]));
    }
    out.M.newton_iterations += wm.newton_iterations;
    out.M.fallbacks += wm.fallbacks;
    level += steps;
  }
  return out;
}

CoupledContinuation run_coupled(const ProblemSpec& spec, const TimeGrid& tg,
                                const EpsSchedule& sched, const CouplingConfig& cc,
                                const EllipticConfig& ec,
                                const NewtonObserver& observer) {
  sched.validate();
  CoupledContinuation out;
  out.eps = sched.eps;
  CoupledResult prev = run_coupled(spec, tg, sched.eps[0], cc, ec, observer);
  int rises = 0;
  for (std::size_t q = 1; q < sched.eps.size(); ++q) {
    CoupledResult next = run_coupled(spec, tg, sched.eps[q], cc, ec, observer);
    out.distances.push_back(trajectory_distance(spec.grid, prev.M, next.M));
    const std::size_t m = out.distances.size();
    if (m >= 2 && out.distances[m - 1] > 0.0 &&
        !(out.distances[m - 1] < out.distances[m - 2])) {
      if (++rises >= 2) out.non_cauchy = true;
    } else {
      rises = 0;
    }
    prev = std::move(next);
  }
  out.finest = std::move(prev);
  return out;
}

}  // namespace rothe
