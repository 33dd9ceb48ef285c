#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "rothe/coefficient_law.hpp"
#include "rothe/errors.hpp"
#include "rothe/kinetics.hpp"
#include "rothe/problem.hpp"
#include "rothe/transforms.hpp"

using namespace rothe;

TEST_CASE("eval_D0 matches direct evaluation") {
  const CoefficientLaw sing(PowerLawSingular{1.0, 1.0, 1.0});
  CHECK(eval_D0(sing, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_D0(sing, 0.0) == 0.0);
  const CoefficientLaw pme(PowerLaw{2.0});
  CHECK(eval_D0(pme, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(eval_D0(pme, 0.0) == 0.0);
  const CoefficientLaw tab(Tabulated{{0.0, 0.5, 0.9}, {0.0, 1.0, 3.0}}, 0.8);
  CHECK(eval_D0(tab, 0.0) == 0.0);
  CHECK(eval_D0(tab, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("eval_D0 domain errors") {
  const CoefficientLaw sing(PowerLawSingular{1.0, 1.0, 1.0});
  CHECK_THROWS_AS((void)sing(1.0), DomainError);
  CHECK_THROWS_AS((void)sing(-0.1), DomainError);
  const CoefficientLaw pme(PowerLaw{1.0});
  CHECK_THROWS_AS((void)pme(-1e-3), DomainError);
  CHECK_NOTHROW((void)pme(1.5));
}

TEST_CASE("singular law blows up toward 1") {
  const CoefficientLaw sing(PowerLawSingular{0.5, 2.0, 1.5});
  CHECK(sing(1.0 - 1e-6) > 1e3 * sing(0.5));
  CHECK(sing.singular());
  CHECK(sing.growth_exponent() == 2.0);
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS((void)CoefficientLaw(PowerLawSingular{-1.0, 1.0, 1.0}));
  CHECK_THROWS((void)CoefficientLaw(PowerLawSingular{1.0, 0.5, 1.0}));
  CHECK_THROWS((void)CoefficientLaw(PowerLaw{0.0}));
  // Tabulated must start at (0, 0) and be positive afterwards.
  CHECK_THROWS((void)CoefficientLaw(Tabulated{{0.0, 0.5}, {0.1, 1.0}}));
  CHECK_THROWS((void)CoefficientLaw(Tabulated{{0.0, 0.5, 0.7}, {0.0, 1.0, 0.0}}));
}

TEST_CASE("Kirchhoff transform of power laws") {
  const KirchhoffTransform k1(CoefficientLaw(PowerLaw{1.0}));
  CHECK(kirchhoff(k1, 0.5) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(kirchhoff(k1, 0.0) == 0.0);
  CHECK(kirchhoff_inv(k1, 0.125) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kirchhoff_inv(k1, 0.0) == 0.0);
  const KirchhoffTransform k2(CoefficientLaw(PowerLaw{2.0}));
  CHECK(kirchhoff(k2, 0.3) == doctest::Approx(0.009).epsilon(1e-12));
  CHECK(kirchhoff_inv(k2, 0.009) == doctest::Approx(0.3).epsilon(1e-11));
  CHECK_THROWS_AS((void)kirchhoff(k1, -0.1), DomainError);
  CHECK_THROWS_AS((void)kirchhoff_inv(k1, k1.max_value() * 2.0), RangeError);
}

TEST_CASE("Kirchhoff transform of the singular law against the closed form") {
  // D = m/(1-m): Phi(m) = -m - ln(1-m).
  const KirchhoffTransform k(CoefficientLaw(PowerLawSingular{1.0, 1.0, 1.0}));
  for (double m : {0.1, 0.5, 0.9, 0.999, 1.0 - 1e-6}) {
    const double exact = -m - std::log1p(-m);
    CHECK(kirchhoff(k, m) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("Kirchhoff round trip on random samples") {
  const KirchhoffTransform k(CoefficientLaw(PowerLawSingular{0.7, 1.5, 2.0}));
  const RegularizedTransform r(CoefficientLaw(PowerLawSingular{0.7, 1.5, 2.0}), 1e-3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0 - kEtaCap);
  double worst_k = 0.0, worst_r = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double m = dist(rng);
    worst_k = std::max(worst_k, std::abs(kirchhoff_inv(k, kirchhoff(k, m)) - m));
    worst_r = std::max(worst_r, std::abs(beta_eps(r, phi_eps(r, m)) - m));
  }
  CHECK(worst_k <= 1e-9);
  CHECK(worst_r <= 1e-9);
}

TEST_CASE("regularized transform examples") {
  const RegularizedTransform r(CoefficientLaw(PowerLaw{1.0}), 0.1);
  CHECK(phi_eps(r, 0.05) == doctest::Approx(0.005).epsilon(1e-13));
  CHECK(phi_eps(r, 0.5) == doctest::Approx(0.13).epsilon(1e-13));
  CHECK(phi_eps(r, 0.0) == 0.0);
  CHECK(beta_eps(r, 0.13) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_eps(r, 0.0) == 0.0);
  CHECK(beta_eps(r, phi_eps(r, 0.73)) == doctest::Approx(0.73).epsilon(1e-12));
  // Linear continuation outside [0, 1).
  CHECK(phi_eps(r, -0.2) == doctest::Approx(-0.02).epsilon(1e-13));
  CHECK(beta_eps(r, phi_eps(r, 2.5)) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("derivative clamps of the regularized transform") {
  for (double eps : {1e-1, 1e-3, 1e-5}) {
    const RegularizedTransform r(CoefficientLaw(PowerLawSingular{1.0, 2.0, 1.0}), eps);
    const double lo = eps * (1.0 - 1e-8), hi = (1.0 + 1e-8) / eps;
    bool ok = true;
    for (double m = -0.5; m < 1.5; m += 1e-3) {
      const double q = (phi_eps(r, m + 1e-4) - phi_eps(r, m)) / 1e-4;
      ok = ok && q >= lo && q <= hi;
    }
    CHECK(ok);
  }
}

TEST_CASE("regularization consistency as eps decreases") {
  const CoefficientLaw law(PowerLawSingular{1.0, 1.0, 1.0});
  const KirchhoffTransform k(law);
  for (double m : {0.05, 0.4, 0.9}) {
    double prev = INFINITY;
    double worst_c = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const RegularizedTransform r(law, eps);
      const double err = std::abs(phi_eps(r, m) - kirchhoff(k, m));
      CHECK(err <= prev);
      prev = err;
      worst_c = std::max(worst_c, err / eps);
    }
    MESSAGE("observed constant C for m=" << m << ": " << worst_c);
    CHECK(std::isfinite(worst_c));
  }
}

TEST_CASE("Monod Lipschitz estimate") {
  Kinetics k;
  k.name = "f1 only";
  k.f0 = [](double, std::span<const double>) { return 0.0; };
  k.fj = {[](double m, std::span<const double> s) { return -s[0] * m / (1.0 + s[0]); }};
  k.f_max = [](double) { return 0.0; };
  SamplingBox box;
  box.s = {{0.0, 1.0}};
  const double c = estimate_lipschitz(k, box);
  CHECK(c >= 0.5);
  CHECK(c <= 1.0);
}

TEST_CASE("trivial Lipschitz estimates") {
  const Kinetics zero = zero_kinetics(1);
  SamplingBox box;
  box.s = {{0.0, 1.0}};
  CHECK(estimate_lipschitz(zero, box) == 0.0);
  Kinetics lin = zero_kinetics(0);
  lin.f0 = [](double m, std::span<const double>) { return 2.0 * m; };
  SamplingBox box0;
  CHECK(estimate_lipschitz(lin, box0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("preset kinetics satisfy their structural bounds") {
  SamplingBox box;
  box.s = {{0.0, 2.0}};
  CHECK_NOTHROW(validate_kinetics(eberl2001_kinetics({}), box));
  CHECK_NOTHROW(validate_kinetics(cellulolytic2017_kinetics(0.0), box));
  CHECK_NOTHROW(validate_kinetics(cellulolytic2017_kinetics(0.3), box));
  const Kinetics e = eberl2001_kinetics({});
  CHECK(e.lipschitz >= estimate_lipschitz(e, box));
  // f0(0, s) >= 0 on a 1000-point sample.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ds(0.0, 5.0);
  bool ok = true;
  for (int i = 0; i < 1000; ++i) {
    const double s = ds(rng);
    ok = ok && e.rate0(0.0, std::span<const double>(&s, 1)) >= 0.0;
  }
  CHECK(ok);
}

TEST_CASE("rates are clamped in m outside [0, 1]") {
  const Kinetics c = cellulolytic2017_kinetics(0.0);
  const double s = 1.0;
  const std::span<const double> sp(&s, 1);
  CHECK(c.rate0(1.7, sp) == c.rate0(1.0, sp));
  CHECK(c.rate0(-0.3, sp) == c.rate0(0.0, sp));
  CHECK(c.rate(0, 0.0, sp) == 0.0);
}

TEST_CASE("bad kinetics are rejected") {
  Kinetics k = zero_kinetics(0);
  k.f0 = [](double m, std::span<const double>) { return m - 0.5; };  // f0(0) < 0
  k.lipschitz = 1.0;
  k.f_max = [](double) { return 1.0; };
  SamplingBox box;
  CHECK_THROWS_AS(validate_kinetics(k, box), InvalidProblem);
  Kinetics steep = zero_kinetics(0);
  steep.f0 = [](double m, std::span<const double>) { return 3.0 * m; };
  steep.f_max = [](double m) { return 3.0 * m; };
  steep.lipschitz = 1.0;
  CHECK_THROWS_AS(validate_kinetics(steep, box), InvalidProblem);
}

TEST_CASE("problem validation") {
  const StructuredGrid g(1, {8, 1}, {1.0, 1.0});
  ProblemSpec spec{g, CoefficientLaw(PowerLawSingular{}), cellulolytic2017_kinetics(0.0),
                   Field(8, 0.3), 0.0, {SubstrateSpec{0.0, ConstantDiffusion{}, {0, 0}, 0.0, Field(8, 1.0)}},
                   1.0};
  CHECK_NOTHROW(spec.validate());
  const DataBounds b = spec.data_bounds();
  CHECK(b.M_lo == 0.3);
  CHECK(b.S_hi == 1.0);

  ProblemSpec bad = spec;
  bad.M0[3] = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidProblem);
  bad = spec;
  bad.M0[2] = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidProblem);
  bad = spec;
  bad.M0[1] = NAN;
  CHECK_THROWS(bad.validate());

  // Boundary value outside the data range.
  ProblemSpec dir = spec;
  dir.grid = StructuredGrid(1, {8, 1}, {1.0, 1.0}, {true, false, false, false});
  dir.h0 = 0.6;
  CHECK_THROWS_AS(dir.validate(), InvalidProblem);
  dir.h0 = 0.3;
  CHECK_NOTHROW(dir.validate());

  // Mobile degenerate substrate needs no flow.
  ProblemSpec deg = spec;
  deg.substrates[0].nu = 1.0;
  deg.substrates[0].h = 1.0;
  deg.substrates[0].D = SubstrateOwnDiffusion{1.0, 1.0, 0.0};
  CHECK_NOTHROW(deg.validate());
  deg.substrates[0].v = {0.5, 0.0};
  CHECK_THROWS_AS(deg.validate(), InvalidProblem);

  // Mixed law bounds must hold.
  ProblemSpec mixed = spec;
  mixed.substrates[0].nu = 1.0;
  mixed.substrates[0].h = 1.0;
  mixed.substrates[0].D = switch_diffusion(0.2, 1.0);
  CHECK_NOTHROW(mixed.validate());
  MixedDiffusion liar = switch_diffusion(0.2, 1.0);
  liar.d_max = 0.5;
  mixed.substrates[0].D = liar;
  CHECK_THROWS_AS(mixed.validate(), InvalidProblem);
}

TEST_CASE("substrate diffusion laws") {
  const SubstrateOwnDiffusion d{2.0, 2.0, 0.1};
  CHECK(d(0.5) == doctest::Approx(0.6));
  CHECK(d(-1.0) == doctest::Approx(0.1));
  CHECK(d.primitive(0.5) == doctest::Approx(0.05 + 2.0 * 0.125 / 3.0));
  CHECK_FALSE(d.degenerate());
  const MixedDiffusion sw = switch_diffusion(0.2, 1.0);
  const double s = 0.0;
  CHECK(sw.fn(1.0, std::span<const double>(&s, 1)) == doctest::Approx(0.2));
  CHECK(sw.fn(0.0, std::span<const double>(&s, 1)) == doctest::Approx(1.0));
}
