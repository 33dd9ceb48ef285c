#include "rothe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "rothe/bounds.hpp"
#include "rothe/commands.hpp"
#include "rothe/coupling.hpp"
#include "rothe/errors.hpp"
#include "rothe/regularity.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

namespace {

Field random_field(std::size_t cells, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(cells);
  for (auto& v : f) v = dist(rng);
  return f;
}

double tol_mp(double c_l, double tau) { return 1e-8 + 2.0 * c_l * tau; }

// Linear interpolation of sampled comparison data.
double sample_at(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x <= t.front()) return y.front();
  if (x >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * y[i - 1] + w * y[i];
}

CheckResult at_most(const std::string& suite, const std::string& check, double value,
                    double limit) {
  return {suite, check, value <= limit, value, limit};
}

CheckResult at_least(const std::string& suite, const std::string& check, double value,
                     double limit) {
  return {suite, check, value >= limit, value, limit};
}

ProblemSpec monod_problem(int n, FaceMask gamma1, Field m0, double h0, SubstrateSpec sub,
                          double T) {
  const StructuredGrid g(1, {n, 1}, {1.0, 1.0}, gamma1);
  ProblemSpec spec{g,  CoefficientLaw(PowerLawSingular{0.1, 1.0, 1.0}),
                   eberl2001_kinetics({}, 1), std::move(m0), h0, {std::move(sub)}, T};
  spec.validate();
  return spec;
}

std::vector<CheckResult> max_principle() {
  const std::string suite = "max-principle";
  std::vector<CheckResult> out;
  const std::array<FaceMask, 3> masks{kAllNeumann,
                                      FaceMask{true, false, false, false},
                                      FaceMask{true, true, false, false}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const int n = 32;
    SubstrateSpec sub;
    sub.nu = 1.0;
    sub.D = ConstantDiffusion{0.5};
    sub.S0 = random_field(static_cast<std::size_t>(n), 0.2, 1.0, 100 + seed);
    sub.h = 0.6;
    const ProblemSpec spec =
        monod_problem(n, masks[seed - 1], random_field(static_cast<std::size_t>(n), 0.1, 0.5, seed),
                      0.3, sub, 0.5);
    const TimeGrid tg{0.5, 50};
    const CoupledResult r = run_coupled(spec, tg, 1e-3, CouplingConfig{});
    const Curve hat = hat_M(spec.data_bounds().M_hi, spec.kinetics.f_max, spec.T);
    const double tol = tol_mp(spec.kinetics.lipschitz, tg.tau());
    double lo = std::numeric_limits<double>::infinity(), excess = -1.0;
    for (std::size_t k = 0; k < r.M.M.size(); ++k) {
      lo = std::min(lo, integrate(spec.grid, r.M.M[k], Norm::Min));
      excess = std::max(excess, integrate(spec.grid, r.M.M[k], Norm::Max) - hat(r.M.times[k]));
    }
    const std::string tag = "scenario " + std::to_string(seed);
    out.push_back(at_least(suite, tag + ": min M", lo, -1e-10));
    out.push_back(at_most(suite, tag + ": max M - hat_M", excess, tol));
  }
  return out;
}

std::vector<CheckResult> contraction() {
  const std::string suite = "contraction";
  std::vector<CheckResult> out;
  const int n = 32;
  SubstrateSpec sub;
  sub.S0 = Field(static_cast<std::size_t>(n), 0.5);
  const ProblemSpec spec = monod_problem(
      n, kAllNeumann, random_field(static_cast<std::size_t>(n), 0.2, 0.4, 7), 0.0, sub, 0.5);
  const TimeGrid tg{0.5, 100};
  SubstrateSnapshot s1{Field(static_cast<std::size_t>(n), 0.5)};
  SubstrateSnapshot s2 = s1;
  for (std::size_t i = 0; i < s2[0].size(); ++i) {
    const double x = spec.grid.center(i)[0];
    s2[0][i] += 0.3 * std::max(0.0, 1.0 - 16.0 * (x - 0.5) * (x - 0.5));
  }
  const auto levels = static_cast<std::size_t>(tg.N + 1);
  const Trajectory a = run_M_given_S(spec, SubstrateHistory(levels, s1), 1e-3, tg);
  const Trajectory b = run_M_given_S(spec, SubstrateHistory(levels, s2), 1e-3, tg);
  Field d(a.M.back().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.M.back()[i] - b.M.back()[i];
  Field ds(s1[0].size());
  for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = s1[0][i] - s2[0][i];
  const double c = spec.kinetics.lipschitz;
  const double bound = c * std::exp(c * tg.T) * tg.T * integrate(spec.grid, ds, Norm::L1);
  out.push_back(at_most(suite, "L1 gap at T vs C_L e^(C_L T) int ||ds||", integrate(spec.grid, d, Norm::L1),
                        1.1 * bound));
  const double theta = contraction_growth(1.0, 1, 0.5);
  out.push_back(at_most(suite, "window(1, 1, growth(0.5)) - 0.5",
                        std::abs(contraction_window(1.0, 1, theta) - 0.5), 1e-6));
  return out;
}

std::vector<CheckResult> sandwich() {
  const std::string suite = "sandwich";
  std::vector<CheckResult> out;
  const int n = 32;
  SubstrateSpec sub;
  sub.S0 = random_field(static_cast<std::size_t>(n), 0.5, 1.0, 11);
  const ProblemSpec spec = monod_problem(
      n, kAllNeumann, random_field(static_cast<std::size_t>(n), 0.2, 0.4, 12), 0.0, sub, 1.0);
  const TimeGrid tg{1.0, 100};
  const CoupledResult r = run_coupled(spec, tg, 1e-3, CouplingConfig{});
  const DataBounds db = spec.data_bounds();
  const ComparisonCurves c =
      comparison_system(db.M_lo, db.S_lo, db.M_hi, db.S_hi, spec.kinetics, spec.T);
  const double tol = tol_mp(spec.kinetics.lipschitz, tg.tau());
  double worst_m = -1.0, worst_s = -1.0;
  for (std::size_t k = 0; k < r.M.M.size(); ++k) {
    const double t = r.M.times[k];
    const double ml = sample_at(c.t, c.checkM, t), mh = sample_at(c.t, c.hatM, t);
    const double sl = sample_at(c.t, c.checkS, t), sh = sample_at(c.t, c.hatS, t);
    for (std::size_t i = 0; i < r.M.M[k].size(); ++i) {
      worst_m = std::max({worst_m, ml - r.M.M[k][i], r.M.M[k][i] - mh});
      worst_s = std::max({worst_s, sl - r.S[k][0][i], r.S[k][0][i] - sh});
    }
  }
  out.push_back(at_most(suite, "M outside [checkM, hatM]", worst_m, tol));
  out.push_back(at_most(suite, "S outside [checkS, hatS]", worst_s, tol));
  return out;
}

std::vector<CheckResult> conservation() {
  const std::string suite = "conservation";
  std::vector<CheckResult> out;
  const std::vector<std::pair<std::string, CoefficientLaw>> laws{
      {"power a=1", CoefficientLaw(PowerLaw{1.0})},
      {"singular", CoefficientLaw(PowerLawSingular{1.0, 1.0, 1.0})},
  };
  for (const auto& [name, law] : laws) {
    const StructuredGrid g(1, {64, 1}, {1.0, 1.0});
    Field m0(g.cells());
    for (std::size_t i = 0; i < m0.size(); ++i) {
      const double x = g.center(i)[0];
      m0[i] = 0.6 * std::max(0.0, 1.0 - 25.0 * (x - 0.4) * (x - 0.4));
    }
    ProblemSpec spec{g, law, zero_kinetics(), m0, 0.0, {}, 0.2};
    spec.validate();
    EllipticConfig ec;
    ec.tol_newton = 1e-13;
    const Trajectory tr = run_M_given_S(spec, frozen_substrates(spec, 201), 1e-3, TimeGrid{0.2, 200}, ec);
    double drift = 0.0;
    for (std::size_t k = 1; k < tr.M.size(); ++k) {
      drift = std::max(drift, std::abs(integrate(g, tr.M[k], Norm::Mass) -
                                       integrate(g, tr.M[k - 1], Norm::Mass)));
    }
    out.push_back(at_most(suite, name + ": mass drift per step", drift, 1e-12));
  }
  return out;
}

std::vector<CheckResult> regularity() {
  const std::string suite = "regularity";
  std::vector<CheckResult> out;
  out.push_back(at_most(suite, "r(a=1.5)", std::abs(theoretical_exponent(1.5, 0.0) - 1.0), 0.0));
  out.push_back(at_most(suite, "r(a=4, essinf 0)", std::abs(theoretical_exponent(4.0, 0.0) - 0.5), 0.0));
  out.push_back(at_most(suite, "r(a=4, essinf 0.1)", std::abs(theoretical_exponent(4.0, 0.1) - 1.0), 0.0));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> um(0.0, 3.0), ua(0.5, 1.9), ule(-8.0, -1.0);
  double c_small = 0.0, c_large = 0.0;
  for (int q = 0; q < 1000; ++q) {
    const double m = um(rng), alpha = ua(rng), eps = std::pow(10.0, ule(rng));
    const double ratio = std::abs(m * psi_eps(alpha, eps, m)) / (1.0 + psi_eps_primitive(alpha, eps, m));
    double& c = eps < 1e-4 ? c_small : c_large;
    c = std::max(c, ratio);
  }
  out.push_back(at_most(suite, "|m Psi| / (1 + int Psi), eps < 1e-4", c_small, 10.0));
  out.push_back(at_most(suite, "|m Psi| / (1 + int Psi), eps >= 1e-4", c_large, 10.0));

  const StructuredGrid g(1, {200, 1}, {1.0, 1.0});
  Field ramp(g.cells());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = std::max(0.0, g.center(i)[0] - 0.5);
  const FrontFit fit = fit_front_exponent(g, ramp);
  out.push_back(at_most(suite, "front fit on [x]_+: |r_hat - 1|", std::abs(fit.r_hat - 1.0), 1e-6));
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"max-principle", "contraction", "sandwich",
                                              "conservation", "regularity"};
  return names;
}

std::vector<CheckResult> run_verify_suite(const std::string& name) {
  if (name == "max-principle") return max_principle();
  if (name == "contraction") return contraction();
  if (name == "sandwich") return sandwich();
  if (name == "conservation") return conservation();
  if (name == "regularity") return regularity();
  throw ConfigError("unknown suite '" + name + "'");
}

int cmd_verify(const std::vector<std::string>& suites, std::ostream& out) {
  std::vector<std::string> names;
  for (const auto& s : suites) {
    if (s == "all") {
      names.insert(names.end(), verify_suite_names().begin(), verify_suite_names().end());
    } else if (std::find(verify_suite_names().begin(), verify_suite_names().end(), s) ==
               verify_suite_names().end()) {
      out << "unknown suite '" << s << "'; expected one of:";
      for (const auto& n : verify_suite_names()) out << ' ' << n;
      out << " all\n";
      return kExitUsage;
    } else {
      names.push_back(s);
    }
  }
  bool ok = true;
  for (const auto& name : names) {
    std::vector<CheckResult> rows;
    try {
      rows = run_verify_suite(name);
    } catch (const Error& e) {
      rows.push_back({name, std::string("error: ") + e.what(), false, 0.0, 0.0});
    }
    for (const auto& r : rows) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-14s %-4s value=%-24s limit=%-24s %s\n", r.suite.c_str(),
                    r.pass ? "PASS" : "FAIL", csv_number(r.value).c_str(),
                    csv_number(r.limit).c_str(), r.check.c_str());
      out << buf;
      ok = ok && r.pass;
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace rothe
