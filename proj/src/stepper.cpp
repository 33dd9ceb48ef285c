#include "rothe/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

void TimeGrid::validate(const Kinetics& k) const {
  if (!(T > 0.0) || N < 1) throw ConfigError("time grid needs T > 0 and N >= 1");
  if (tau() * k.lipschitz >= 1.0) {
    std::ostringstream msg;
    msg << "tau = " << tau() << " violates tau < 1/C_L = " << 1.0 / k.lipschitz;
    throw TauTooLarge(msg.str());
  }
}

SubstrateHistory frozen_substrates(const ProblemSpec& spec, int levels) {
  SubstrateSnapshot snap;
  for (const auto& sub : spec.substrates) snap.push_back(sub.S0);
  return SubstrateHistory(static_cast<std::size_t>(levels), snap);
}

double Trajectory::total_energy() const {
  double s = 0.0;
  for (double e : energy) s += e;
  return s;
}

bool reaches_blowup(std::span<const double> m) {
  return *std::max_element(m.begin(), m.end()) >= 1.0 - kEtaStop;
}

RotheStepper::RotheStepper(const ProblemSpec& spec, double eps,
                           EllipticConfig cfg)
    : spec_(spec), transform_(spec.law, eps), cfg_(cfg) {
  cfg_.validate();
}

StepResult RotheStepper::step(std::span<const double> m_prev,
                              const SubstrateSnapshot& s, double tau,
                              std::span<const double> u_guess) const {
  const StepData d{spec_.grid, transform_, spec_.kinetics, m_prev, s, tau, spec_.h0};
  return solve_time_step(d, cfg_, u_guess, observer_);
}

double RotheStepper::gradient_norm2(std::span<const double> u) const {
  return gradient_energy(spec_.grid, u, spec_.grid.gamma1(),
                         transform_.phi(spec_.h0));
}

Trajectory RotheStepper::start(const Field& m0, double t0) const {
  Trajectory tr;
  tr.eps = transform_.eps();
  tr.times.push_back(t0);
  tr.M.push_back(m0);
  Field u0(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) u0[i] = transform_.phi(m0[i]);
  tr.u.push_back(std::move(u0));
  tr.energy.push_back(0.0);
  return tr;
}

void RotheStepper::advance(Trajectory& tr, const SubstrateHistory& s, int count,
                           double tau, const std::vector<Field>* guesses) const {
  const double t0 = tr.times.back();
  for (int n = 1; n <= count; ++n) {
    const std::span<const double> guess =
        guesses ? std::span<const double>((*guesses)[static_cast<std::size_t>(n - 1)])
                : std::span<const double>();
    StepResult r = step(tr.M.back(), s[static_cast<std::size_t>(n)], tau, guess);
    tr.newton_iterations += r.iterations;
    if (r.used_fallback) ++tr.fallbacks;
    const double t = t0 + n * tau;
    if (reaches_blowup(r.m)) {
      tr.blowup = true;
      tr.blowup_time = t;
      return;
    }
    tr.times.push_back(t);
    tr.energy.push_back(tau * gradient_norm2(r.u));
    tr.u.push_back(std::move(r.u));
    tr.M.push_back(std::move(r.m));
  }
}

namespace {

void check_history(const SubstrateHistory& s, const ProblemSpec& spec, int N) {
  if (s.size() < static_cast<std::size_t>(N + 1)) {
    throw InvalidProblem("substrate history has " + std::to_string(s.size()) +
                         " levels, need " + std::to_string(N + 1));
  }
  for (const auto& snap : s) {
    if (snap.size() != spec.k()) {
      throw InvalidProblem("substrate snapshot has wrong substrate count");
    }
  }
}

Trajectory run_with_guesses(const ProblemSpec& spec, const SubstrateHistory& s,
                            double eps, const TimeGrid& tg,
                            const EllipticConfig& cfg, const Trajectory* warm) {
  tg.validate(spec.kinetics);
  check_history(s, spec, tg.N);
  RotheStepper stepper(spec, eps, cfg);
  Trajectory tr = stepper.start(spec.M0, 0.0);
  if (!warm) {
    stepper.advance(tr, s, tg.N, tg.tau());
    return tr;
  }
  // Warm start: carry M across levels, not u.
  std::vector<Field> guesses;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(tg.N); ++n) {
    const Field& m = warm->M[std::min(n, warm->M.size() - 1)];
    Field g(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) g[i] = stepper.transform().phi(m[i]);
    guesses.push_back(std::move(g));
  }
  stepper.advance(tr, s, tg.N, tg.tau(), &guesses);
  return tr;
}

}  // namespace

Trajectory run_M_given_S(const ProblemSpec& spec, const SubstrateHistory& s,
                         double eps, const TimeGrid& tg,
                         const EllipticConfig& cfg) {
  return run_with_guesses(spec, s, eps, tg, cfg, nullptr);
}

Field eval_interpolant(const Trajectory& tr, double t, Interp mode,
                       const RegularizedTransform& r) {
  if (tr.times.empty() || t < tr.times.front() || t > tr.times.back()) {
    throw RangeError("interpolant evaluated outside the stored time span");
  }
  const auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
  const auto n = static_cast<std::size_t>(it - tr.times.begin());
  if (n == 0 || *it == t) return tr.u[n];
  if (mode == Interp::Hat) return tr.u[n];
  const double theta = (t - tr.times[n - 1]) / (tr.times[n] - tr.times[n - 1]);
  Field out(tr.u[n].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double b0 = r.beta(tr.u[n - 1][i]);
    const double b1 = r.beta(tr.u[n][i]);
    out[i] = r.phi(b0 + theta * (b1 - b0));
  }
  return out;
}

EpsSchedule EpsSchedule::geometric(double eps0, double ratio, int levels) {
  EpsSchedule s;
  double e = eps0;
  for (int k = 0; k < levels; ++k, e *= ratio) s.eps.push_back(e);
  s.validate();
  return s;
}

void EpsSchedule::validate() const {
  if (eps.empty()) throw ConfigError("eps schedule is empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] < 1.0)) {
      throw ConfigError("eps values must lie in (0, 1)");
    }
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw ConfigError("eps schedule must be strictly decreasing");
    }
  }
}

double trajectory_distance(const StructuredGrid& g, const Trajectory& a,
                           const Trajectory& b) {
  const std::size_t levels = std::min(a.M.size(), b.M.size());
  double d = 0.0;
  for (std::size_t n = 1; n < levels; ++n) {
    const double tau = a.times[n] - a.times[n - 1];
    double s = 0.0;
    for (std::size_t i = 0; i < a.M[n].size(); ++i) s += std::abs(a.M[n][i] - b.M[n][i]);
    d += tau * s * g.cell_volume();
  }
  return d;
}

ContinuationResult run_eps_continuation(const ProblemSpec& spec,
                                        const SubstrateHistory& s,
                                        const EpsSchedule& sched,
                                        const TimeGrid& tg,
                                        const EllipticConfig& cfg) {
  sched.validate();
  ContinuationResult out;
  out.eps = sched.eps;
  Trajectory prev = run_with_guesses(spec, s, sched.eps[0], tg, cfg, nullptr);
  int rises = 0;
  for (std::size_t k = 1; k < sched.eps.size(); ++k) {
    Trajectory next = run_with_guesses(spec, s, sched.eps[k], tg, cfg, &prev);
    out.distances.push_back(trajectory_distance(spec.grid, prev, next));
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
