#include "rothe/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>

#include "rothe/barenblatt.hpp"
#include "rothe/coupling.hpp"
#include "rothe/errors.hpp"
#include "rothe/regularity.hpp"

namespace rothe {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidProblem*>(&e) ||
      dynamic_cast<const TauTooLarge*>(&e) || dynamic_cast<const OracleUnavailable*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const MonotonicityViolation*>(&e)) return kExitHypothesis;
  return kExitSolverFailure;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::ofstream open_csv(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

void write_kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << ',' << value << '\n';
}

std::string opt_number(const std::optional<double>& v) {
  return v ? csv_number(*v) : std::string("none");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::BlowUpPredicted:
      return "BlowUpPredicted";
    case Verdict::BoundedBy:
      return "BoundedBy";
    case Verdict::Indeterminate:
      break;
  }
  return "Indeterminate";
}

bool gamma1_nonempty(const StructuredGrid& g) { return !g.gamma1_empty(); }

ScenarioConfig load_with_overrides(const fs::path& config, const RunOptions& opt) {
  ScenarioConfig cfg = load_config(config);
  if (opt.out_dir) cfg.out_dir = opt.out_dir->string();
  if (opt.snapshots) {
    if (*opt.snapshots < 0) throw ConfigError("--snapshots must be nonnegative");
    cfg.snapshots = *opt.snapshots;
  }
  return cfg;
}

fs::path prepare_out(const ScenarioConfig& cfg) {
  const fs::path dir = cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  return dir;
}

void write_field(const fs::path& p, const StructuredGrid& g, const Field& f, double t) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  write_snapshot(out, g, f, t);
}

std::string numbered(const std::string& stem, std::size_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.txt", stem.c_str(), n);
  return buf;
}

}  // namespace

BoundsReport bounds_report(const ProblemSpec& spec, bool strict) {
  BoundsReport r;
  r.data = spec.data_bounds();
  r.envelope = hat_M(r.data.M_hi, spec.kinetics.f_max, spec.T);
  r.delta_margin = delta_margin(r.envelope);
  ClassifyInput in;
  in.hat_max = r.envelope.max();
  in.delta_margin = r.delta_margin;
  if (spec.k() == 1) {
    try {
      check_comparison_hypotheses(spec.kinetics, std::min(r.data.S_lo, 0.0),
                                  std::max(r.data.S_hi, 1.0));
      r.comparison = comparison_system(r.data.M_lo, r.data.S_lo, r.data.M_hi, r.data.S_hi,
                                       spec.kinetics, spec.T);
      in.check_hit = r.comparison->check_hit;
      r.comparison_note = "available";
    } catch (const MonotonicityViolation& e) {
      if (strict) throw;
      r.comparison_note = std::string("unavailable: ") + e.what();
    }
  } else {
    r.comparison_note = "unavailable: comparison system needs exactly one substrate (k = " +
                        std::to_string(spec.k()) + ")";
  }
  if (gamma1_nonempty(spec.grid)) {
    try {
      const KirchhoffTransform phi(spec.law);
      r.barrier = barrier_delta(spec.grid, phi, spec.kinetics.f_max, r.envelope, r.data.M_hi);
      in.barrier_delta = r.barrier->delta;
      r.barrier_note = "available";
    } catch (const RangeError& e) {
      r.barrier_note = std::string("unavailable: ") + e.what();
    }
  } else {
    r.barrier_note = "unavailable: Gamma_1 is empty";
  }
  r.classification = classify(in);
  return r;
}

void write_bounds_report(const BoundsReport& r, const fs::path& dir) {
  {
    auto out = open_csv(dir / "bounds_envelope.csv");
    out << "t,hat_M\n";
    for (std::size_t i = 0; i < r.envelope.t.size(); ++i) {
      out << csv_number(r.envelope.t[i]) << ',' << csv_number(r.envelope.y[i]) << '\n';
    }
  }
  if (r.comparison) {
    const auto& c = *r.comparison;
    auto out = open_csv(dir / "bounds_comparison.csv");
    out << "t,checkM,checkS,hatM,hatS\n";
    const std::size_t stride = std::max<std::size_t>(1, c.t.size() / 2000);
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      if (i % stride != 0 && i + 1 != c.t.size()) continue;
      out << csv_number(c.t[i]) << ',' << csv_number(c.checkM[i]) << ','
          << csv_number(c.checkS[i]) << ',' << csv_number(c.hatM[i]) << ','
          << csv_number(c.hatS[i]) << '\n';
    }
  }
  auto out = open_csv(dir / "bounds_classification.csv");
  out << "key,value\n";
  write_kv(out, "verdict", verdict_name(r.classification.verdict));
  write_kv(out, "value", r.classification.verdict == Verdict::Indeterminate
                             ? std::string("nan")
                             : csv_number(r.classification.value));
  write_kv(out, "M_lo", csv_number(r.data.M_lo));
  write_kv(out, "M_hi", csv_number(r.data.M_hi));
  write_kv(out, "S_lo", csv_number(r.data.S_lo));
  write_kv(out, "S_hi", csv_number(r.data.S_hi));
  write_kv(out, "envelope_max", csv_number(r.envelope.max()));
  write_kv(out, "delta_margin", csv_number(r.delta_margin));
  write_kv(out, "comparison", '"' + r.comparison_note + '"');
  if (r.comparison) {
    write_kv(out, "check_hit", opt_number(r.comparison->check_hit));
    write_kv(out, "hat_hit", opt_number(r.comparison->hat_hit));
  }
  write_kv(out, "barrier", '"' + r.barrier_note + '"');
  if (r.barrier) {
    write_kv(out, "barrier_c_hat", csv_number(r.barrier->c_hat));
    write_kv(out, "barrier_u_max", csv_number(r.barrier->u_max));
    write_kv(out, "barrier_delta", csv_number(r.barrier->delta));
  }
}

Axis parse_axis(const std::string& s) {
  if (s == "tau") return Axis::Tau;
  if (s == "h") return Axis::H;
  if (s == "eps") return Axis::Eps;
  throw ConfigError("unknown axis '" + s + "' (tau|h|eps)");
}

Field restrict_to(const StructuredGrid& fine, const Field& f, const StructuredGrid& coarse) {
  const int r0 = fine.n(0) / coarse.n(0);
  const int r1 = fine.n(1) / coarse.n(1);
  if (r0 * coarse.n(0) != fine.n(0) || r1 * coarse.n(1) != fine.n(1) ||
      fine.dim() != coarse.dim()) {
    throw DomainError("restrict_to needs nested grids");
  }
  Field out(coarse.cells(), 0.0);
  for (int j = 0; j < fine.n(1); ++j) {
    for (int i = 0; i < fine.n(0); ++i) {
      out[coarse.index(i / r0, j / r1)] += f[fine.index(i, j)];
    }
  }
  const double w = 1.0 / (r0 * r1);
  for (auto& v : out) v *= w;
  return out;
}

namespace {

struct LevelSetup {
  ScenarioConfig cfg;
  double step = 0.0;  // the refined quantity: h, tau or eps
};

struct LevelOutcome {
  StructuredGrid grid;
  Field m;
};

LevelOutcome run_level(const ScenarioConfig& cfg) {
  const ProblemSpec spec = cfg.build_problem();
  const TimeGrid tg = cfg.time_grid();
  CoupledResult r = run_coupled(spec, tg, cfg.eps.back(), cfg.coupling, cfg.elliptic);
  if (r.M.blowup) {
    throw NonConvergence("convergence level blew up at t = " + csv_number(r.M.blowup_time));
  }
  return {spec.grid, r.M.M.back()};
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ConvergenceStudy convergence_study(const ScenarioConfig& base, Axis axis, int levels) {
  if (levels < 2) throw ConfigError("converge needs at least 2 levels");
  if (base.oracle.empty()) {
    throw ConfigError(base.origin + ": converge needs [converge] oracle = barenblatt|self");
  }
  const bool exact = base.oracle == "barenblatt";
  if (exact) {
    if (base.preset != "pme") {
      throw OracleUnavailable("the Barenblatt oracle needs zero kinetics (preset pme)");
    }
    if (base.law == "singular") {
      throw OracleUnavailable("the Barenblatt oracle needs the power law");
    }
    if (!base.substrates.empty()) {
      throw OracleUnavailable("the Barenblatt oracle needs a problem without substrates");
    }
    if (base.gamma1 != kAllNeumann) {
      throw OracleUnavailable("the Barenblatt oracle needs homogeneous Neumann boundaries");
    }
  }
  // Self-convergence needs one extra level to difference against.
  const int runs = exact ? levels : levels + 1;
  std::vector<LevelSetup> setups;
  for (int l = 0; l < runs; ++l) {
    LevelSetup s{base, 0.0};
    const int f = 1 << l;
    if (exact) s.cfg.M0 = InitialSpec{"barenblatt", {}, ""};
    switch (axis) {
      case Axis::H:
        s.cfg.n = {base.n[0] * f, base.dim == 2 ? base.n[1] * f : base.n[1]};
        s.cfg.N = base.N * f;
        s.step = base.extent[0] / s.cfg.n[0];
        break;
      case Axis::Tau:
        s.cfg.N = base.N * f;
        s.step = base.T / s.cfg.N;
        break;
      case Axis::Eps: {
        const double e = static_cast<std::size_t>(l) < base.eps.size() && base.eps.size() > 1
                             ? base.eps[static_cast<std::size_t>(l)]
                             : base.eps.front() * std::pow(0.1, l);
        s.cfg.eps = {e};
        s.step = e;
        break;
      }
    }
    setups.push_back(std::move(s));
  }
  std::vector<std::future<LevelOutcome>> jobs;
  for (const auto& s : setups) {
    jobs.push_back(std::async(std::launch::async, [&s] { return run_level(s.cfg); }));
  }
  std::vector<LevelOutcome> res;
  for (auto& j : jobs) res.push_back(j.get());

  ConvergenceStudy out;
  out.oracle = base.oracle;
  out.axis = axis;
  for (int l = 0; l < levels; ++l) {
    const auto& s = setups[static_cast<std::size_t>(l)];
    const auto& r = res[static_cast<std::size_t>(l)];
    ConvergenceRow row;
    row.level = l;
    row.n = s.cfg.n[0];
    row.N = s.cfg.N;
    row.h = s.cfg.extent[0] / s.cfg.n[0];
    row.tau = s.cfg.T / s.cfg.N;
    row.eps = s.cfg.eps.back();
    Field ref;
    if (exact) {
      // Data is the profile at t0, so the run ends at t0 + T.
      ref = s.cfg.barenblatt().sample(r.grid, s.cfg.oracle_t0 + s.cfg.T);
    } else {
      const auto& next = res[static_cast<std::size_t>(l + 1)];
      ref = restrict_to(next.grid, next.m, r.grid);
    }
    Field diff(r.m.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.m[i] - ref[i];
    row.error = integrate(r.grid, diff, Norm::L1);
    row.order = std::numeric_limits<double>::quiet_NaN();
    out.rows.push_back(row);
  }
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < out.rows.size(); ++l) {
    const double step = setups[l].step;
    if (l + 1 < out.rows.size()) {
      out.rows[l].order = std::log(out.rows[l].error / out.rows[l + 1].error) /
                          std::log(step / setups[l + 1].step);
    }
    lx.push_back(std::log(step));
    ly.push_back(std::log(out.rows[l].error));
  }
  out.fitted_order = lsq_slope(lx, ly);
  return out;
}

int cmd_run(const fs::path& config, const RunOptions& opt, std::ostream& log) {
  const ScenarioConfig cfg = load_with_overrides(config, opt);
  const ProblemSpec spec = cfg.build_problem();
  const TimeGrid tg = cfg.time_grid();
  tg.validate(spec.kinetics);
  validate_coupling(spec, cfg.coupling);
  const fs::path dir = prepare_out(cfg);

  NewtonObserver observer;
  std::size_t solve = 0;
  if (opt.dump_newton) {
    fs::create_directories(dir / "newton");
    observer = [&](int it, const Field& u, double) {
      if (it == 0) ++solve;
      char name[64];
      std::snprintf(name, sizeof name, "solve_%06zu_iter_%03d.txt", solve, it);
      write_field(dir / "newton" / name, spec.grid, u, 0.0);
    };
  }

  CoupledResult result;
  std::vector<double> distances;
  bool non_cauchy = false;
  if (cfg.eps.size() > 1) {
    CoupledContinuation c =
        run_coupled(spec, tg, EpsSchedule{cfg.eps}, cfg.coupling, cfg.elliptic, observer);
    result = std::move(c.finest);
    distances = std::move(c.distances);
    non_cauchy = c.non_cauchy;
  } else {
    result = run_coupled(spec, tg, cfg.eps.front(), cfg.coupling, cfg.elliptic, observer);
  }
  const Trajectory& tr = result.M;

  {
    auto out = open_csv(dir / "series.csv");
    out << "t,mass_M,min_M,max_M,energy_increment\n";
    for (std::size_t n = 0; n < tr.M.size(); ++n) {
      out << csv_number(tr.times[n]) << ',' << csv_number(integrate(spec.grid, tr.M[n], Norm::Mass))
          << ',' << csv_number(integrate(spec.grid, tr.M[n], Norm::Min)) << ','
          << csv_number(integrate(spec.grid, tr.M[n], Norm::Max)) << ','
          << csv_number(tr.energy[n]) << '\n';
    }
  }
  if (spec.k() > 0) {
    auto out = open_csv(dir / "substrates.csv");
    out << "t,substrate,mass_S,min_S,max_S\n";
    for (std::size_t n = 0; n < result.S.size() && n < tr.times.size(); ++n) {
      for (std::size_t j = 0; j < spec.k(); ++j) {
        const Field& s = result.S[n][j];
        out << csv_number(tr.times[n]) << ',' << j + 1 << ','
            << csv_number(integrate(spec.grid, s, Norm::Mass)) << ','
            << csv_number(integrate(spec.grid, s, Norm::Min)) << ','
            << csv_number(integrate(spec.grid, s, Norm::Max)) << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "fixed_point.csv");
    out << "window,sweep,l1_distance,wall_time\n";
    for (const auto& rec : result.log) {
      out << rec.window << ',' << rec.sweep << ',' << csv_number(rec.l1_distance) << ','
          << csv_number(rec.wall_time) << '\n';
    }
  }
  if (!distances.empty()) {
    auto out = open_csv(dir / "continuation.csv");
    out << "level,eps,eps_next,distance\n";
    for (std::size_t q = 0; q < distances.size(); ++q) {
      out << q << ',' << csv_number(cfg.eps[q]) << ',' << csv_number(cfg.eps[q + 1]) << ','
          << csv_number(distances[q]) << '\n';
    }
  }
  if (cfg.snapshots > 0) {
    fs::create_directories(dir / "snapshots");
    const auto stride = static_cast<std::size_t>(cfg.snapshots);
    for (std::size_t n = 0; n < tr.M.size(); n += stride) {
      write_field(dir / "snapshots" / numbered("M", n), spec.grid, tr.M[n], tr.times[n]);
      for (std::size_t j = 0; j < spec.k() && n < result.S.size(); ++j) {
        write_field(dir / "snapshots" / numbered("S" + std::to_string(j + 1), n), spec.grid,
                    result.S[n][j], tr.times[n]);
      }
    }
  }

  const BoundsReport bounds = bounds_report(spec, false);
  write_bounds_report(bounds, dir);
  {
    auto out = open_csv(dir / "report.csv");
    out << "key,value\n";
    write_kv(out, "status", tr.blowup ? "blowup" : "ok");
    write_kv(out, "t_star", tr.blowup ? csv_number(tr.blowup_time) : std::string("none"));
    write_kv(out, "steps", std::to_string(tr.steps()));
    write_kv(out, "eps", csv_number(tr.eps));
    write_kv(out, "newton_iterations", std::to_string(tr.newton_iterations));
    write_kv(out, "fallbacks", std::to_string(tr.fallbacks));
    write_kv(out, "total_energy", csv_number(tr.total_energy()));
    write_kv(out, "windows", std::to_string(result.log.empty() ? 0 : result.log.back().window));
    write_kv(out, "non_cauchy", non_cauchy ? "true" : "false");
    write_kv(out, "bounds", bounds.classification.describe());
  }
  if (non_cauchy) log << "warning: eps-continuation distances are not decreasing\n";
  if (tr.blowup) {
    log << "blow-up flagged at t* = " << csv_number(tr.blowup_time) << '\n';
    return kExitBlowUp;
  }
  log << "completed " << tr.steps() << " steps to t = " << csv_number(tr.times.back())
      << "; outputs in " << dir.string() << '\n';
  return kExitOk;
}

int cmd_bounds(const fs::path& config, const RunOptions& opt, std::ostream& log) {
  const ScenarioConfig cfg = load_with_overrides(config, opt);
  const ProblemSpec spec = cfg.build_problem();
  const BoundsReport r = bounds_report(spec, true);
  const fs::path dir = prepare_out(cfg);
  write_bounds_report(r, dir);
  log << r.classification.describe() << '\n';
  if (!r.comparison) log << "comparison " << r.comparison_note << '\n';
  return kExitOk;
}

int cmd_converge(const fs::path& config, const std::string& axis, int levels,
                 const RunOptions& opt, std::ostream& log) {
  const ScenarioConfig cfg = load_with_overrides(config, opt);
  const Axis ax = parse_axis(axis);
  const ConvergenceStudy study = convergence_study(cfg, ax, levels);
  const fs::path dir = prepare_out(cfg);
  auto out = open_csv(dir / ("converge_" + axis + ".csv"));
  out << "level,n,N,h,tau,eps,error,order\n";
  for (const auto& r : study.rows) {
    out << r.level << ',' << r.n << ',' << r.N << ',' << csv_number(r.h) << ','
        << csv_number(r.tau) << ',' << csv_number(r.eps) << ',' << csv_number(r.error) << ','
        << csv_number(r.order) << '\n';
  }
  out << "# fitted_order," << csv_number(study.fitted_order) << '\n';
  log << "oracle " << study.oracle << ", axis " << axis << ": fitted order "
      << csv_number(study.fitted_order) << '\n';
  return kExitOk;
}

int cmd_regularity(const fs::path& config, const RunOptions& opt, std::ostream& log) {
  const ScenarioConfig cfg = load_with_overrides(config, opt);
  const ProblemSpec spec = cfg.build_problem();
  const TimeGrid tg = cfg.time_grid();
  const CoupledResult r =
      run_coupled(spec, tg, cfg.eps.back(), cfg.coupling, cfg.elliptic);
  const double a = spec.law.growth_exponent();
  const RegularityConfig rc = RegularityConfig::for_exponent(a, cfg.eps.back());
  const double functional = weighted_gradient_functional(spec.grid, r.M, rc.a, rc.alpha);
  const double essinf = integrate(spec.grid, spec.M0, Norm::Min);
  const double r_theory = theoretical_exponent(a, essinf);
  FrontFit fit;
  std::string front_note = "ok";
  try {
    fit = fit_front_exponent(spec.grid, r.M.M.back());
  } catch (const NoFront& e) {
    front_note = e.what();
    fit.gamma = fit.r_hat = fit.residual = fit.front = std::numeric_limits<double>::quiet_NaN();
  }
  const fs::path dir = prepare_out(cfg);
  auto out = open_csv(dir / "regularity.csv");
  out << "a,alpha,functional,gamma_hat,r_hat,r_theory,front,points,residual,note\n";
  out << csv_number(rc.a) << ',' << csv_number(rc.alpha) << ',' << csv_number(functional) << ','
      << csv_number(fit.gamma) << ',' << csv_number(fit.r_hat) << ',' << csv_number(r_theory)
      << ',' << csv_number(fit.front) << ',' << fit.points << ',' << csv_number(fit.residual)
      << ",\"" << front_note << "\"\n";
  log << "functional " << csv_number(functional) << ", r_hat " << csv_number(fit.r_hat)
      << ", r_theory " << csv_number(r_theory) << '\n';
  return r.M.blowup ? kExitBlowUp : kExitOk;
}

}  // namespace rothe
