#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rothe/coupling.hpp"
#include "rothe/errors.hpp"

using namespace rothe;

namespace {

Kinetics linear_decay() {
  Kinetics k;
  k.name = "decay";
  k.f0 = [](double, std::span<const double>) { return 0.0; };
  k.fj = {[](double, std::span<const double> s) { return -s[0]; }};
  k.f_max = [](double) { return 0.0; };
  k.lipschitz = 1.0;
  return k;
}

SubstrateSpec mobile(double nu, double d, double h, Field s0) {
  SubstrateSpec s;
  s.nu = nu;
  s.D = ConstantDiffusion{d};
  s.h = h;
  s.S0 = std::move(s0);
  return s;
}

// One backward-Euler step of the uniform cellulolytic pair, solved by
// bisection on the substrate value.
std::pair<double, double> uniform_pair_step(double m, double s, double tau, double lambda) {
  auto m_of = [&](double x) { return m / (1.0 - tau * (x / (1.0 + x) - lambda)); };
  auto g = [&](double x) { return x + tau * x * m_of(x) / (1.0 + x) - s; };
  double lo = 0.0, hi = s;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return {m_of(x), x};
}

}  // namespace

TEST_CASE("contraction window") {
  CHECK(contraction_growth(1.0, 1, 0.0) == 0.0);
  const double g = contraction_growth(1.0, 1, 0.5);
  CHECK(g == doctest::Approx(0.5 * (1.0 + 0.5 * std::exp(0.5))).epsilon(1e-14));
  CHECK(g == doctest::Approx(0.9122).epsilon(1e-4));
  CHECK(contraction_window(1.0, 1, g) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(contraction_growth(2.0, 3, 0.1) == doctest::Approx(3 * 0.2 * (1.0 + 0.2 * std::exp(0.2))));
  const double w = contraction_window(1.0, 2, 0.5);
  CHECK(contraction_growth(1.0, 2, w) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS((void)contraction_window(0.0, 1, 0.5));

  CHECK(window_steps(1.0, 1, g, 0.1, 100) == 5);
  CHECK(window_steps(1.0, 1, g, 0.3, 100) == 1);
  CHECK(window_steps(1.0, 1, g, 0.01, 20) == 20);
}

TEST_CASE("mobile substrate with Dirichlet walls: two-cell hand solve") {
  // Ghost-Dirichlet stencil at h = 1 gives L = [[3, -1], [-1, 3]], so
  // (I + L) s = (1, 1) has s = 1/3 in both cells.
  const StructuredGrid g(1, {2, 1}, {2.0, 1.0});
  const SubstrateSpec sub = mobile(1.0, 1.0, 0.0, Field(2, 1.0));
  const Field m(2, 0.0);
  const SubstrateSnapshot all{Field(2, 1.0)};
  const Field s = step_substrate_pde(g, sub, 0, Field{1.0, 1.0}, m, all, 1.0, zero_kinetics(1));
  // Cramer's rule on [[4, -1], [-1, 4]].
  const double oracle = (4.0 * 1.0 + 1.0) / 15.0;
  CHECK(s[0] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("boundary value is a steady state and positivity holds") {
  const StructuredGrid g(2, {10, 8}, {1.0, 1.0});
  SubstrateSpec sub = mobile(0.7, 0.5, 0.4, Field(g.cells(), 0.4));
  sub.v = {0.6, -0.3};
  const Field m(g.cells(), 0.0);
  const SubstrateSnapshot flat{Field(g.cells(), 0.4)};
  const Field s = step_substrate_pde(g, sub, 0, flat[0], m, flat, 0.05, zero_kinetics(1));
  for (double v : s) CHECK(v == doctest::Approx(0.4).epsilon(1e-10));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Field prev(g.cells()), mm(g.cells());
  for (auto& v : prev) v = d(rng);
  for (auto& v : mm) v = 0.9 * d(rng);
  const SubstrateSnapshot all{prev};
  const Field r = step_substrate_pde(g, sub, 0, prev, mm, all, 0.05, eberl2001_kinetics({}));
  for (double v : r) CHECK(v >= -1e-14);
}

TEST_CASE("immobile substrate steps") {
  const Field one(4, 1.0);
  const SubstrateSnapshot all{one};
  const Field s = step_substrate_ode(0, one, Field(4, 0.3), all, 0.1, linear_decay());
  for (double v : s) CHECK(v == doctest::Approx(1.0 / 1.1).epsilon(1e-13));

  const Field t = step_substrate_ode(0, one, Field(4, 0.0), all, 0.1, eberl2001_kinetics({}));
  for (double v : t) CHECK(v == 1.0);
}

TEST_CASE("zero kinetics converge in one sweep per window") {
  const StructuredGrid g(1, {16, 1}, {1.0, 1.0});
  SubstrateSpec sub;
  sub.S0 = Field(g.cells(), 0.5);
  Field m0(g.cells());
  for (std::size_t i = 0; i < m0.size(); ++i) m0[i] = 0.2 + 0.2 * std::cos(3.0 * g.center(i)[0]);
  ProblemSpec spec{g, CoefficientLaw(PowerLawSingular{}), zero_kinetics(1), m0, 0.0, {sub}, 1.0};
  CouplingConfig cc;
  const CoupledResult r = run_coupled(spec, TimeGrid{1.0, 20}, 1e-3, cc);
  CHECK(r.M.steps() == 20);
  REQUIRE(r.S.size() == r.M.M.size());
  for (const auto& rec : r.log) {
    CHECK(rec.sweep == 1);
    CHECK(rec.l1_distance == 0.0);
  }
  for (const auto& snap : r.S) CHECK(snap[0] == sub.S0);
}

TEST_CASE("uniform cellulolytic state matches the scalar implicit pair") {
  const StructuredGrid g(1, {6, 1}, {1.0, 1.0});
  const double lambda = 0.1;
  SubstrateSpec sub;
  sub.S0 = Field(g.cells(), 2.0);
  ProblemSpec spec{g, CoefficientLaw(PowerLawSingular{}), cellulolytic2017_kinetics(lambda),
                   Field(g.cells(), 0.2), 0.0, {sub}, 1.0};
  CouplingConfig cc;
  cc.tol_fp = 1e-14;
  cc.mode = CouplingMode::Banach;
  const TimeGrid tg{1.0, 40};
  const CoupledResult r = run_coupled(spec, tg, 1e-3, cc);
  REQUIRE_FALSE(r.M.blowup);
  double m = 0.2, s = 2.0, worst = 0.0;
  for (int n = 1; n <= tg.N; ++n) {
    std::tie(m, s) = uniform_pair_step(m, s, tg.tau(), lambda);
    const auto nu = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      worst = std::max(worst, std::abs(r.M.M[nu][i] - m));
      worst = std::max(worst, std::abs(r.S[nu][0][i] - s));
    }
  }
  MESSAGE("max deviation from the scalar pair " << worst);
  CHECK(worst <= 1e-10);
}

TEST_CASE("stall and mode validation") {
  const StructuredGrid g(1, {8, 1}, {1.0, 1.0});
  SubstrateSpec sub;
  sub.S0 = Field(g.cells(), 1.0);
  ProblemSpec spec{g, CoefficientLaw(PowerLawSingular{}), eberl2001_kinetics({}),
                   Field(g.cells(), 0.3), 0.0, {sub}, 0.5};
  CouplingConfig cc;
  cc.max_sweeps = 1;
  cc.tol_fp = 1e-14;
  CHECK_THROWS_AS((void)run_coupled(spec, TimeGrid{0.5, 10}, 1e-3, cc), FixedPointStall);

  ProblemSpec mixed = spec;
  mixed.substrates[0].nu = 1.0;
  mixed.substrates[0].D = switch_diffusion(0.5, 1.0);
  CouplingConfig banach;
  banach.mode = CouplingMode::Banach;
  CHECK_THROWS_AS(validate_coupling(mixed, banach), ConfigError);
  CHECK_NOTHROW(validate_coupling(mixed, CouplingConfig{}));
  CHECK_NOTHROW(validate_coupling(spec, banach));

  CouplingConfig bad;
  bad.theta_c = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
