#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rothe/bounds.hpp"
#include "rothe/errors.hpp"
#include "rothe/stepper.hpp"

using namespace rothe;

namespace {

// Composite Simpson quadrature of the constant-state blow-up integral
// int_{m}^{1} (1 + c - M) / (M (c - M)) dM.
double blowup_integral(double m_bar, double c) {
  const int n = 20000;
  const double h = (1.0 - m_bar) / n;
  auto f = [c](double m) { return (1.0 + c - m) / (m * (c - m)); };
  double s = f(m_bar) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(m_bar + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("upper envelope ODE") {
  const Curve flat = hat_M(0.3, [](double) { return 0.0; }, 2.0);
  for (double y : flat.y) CHECK(y == 0.3);
  const Curve ex = hat_M(0.2, [](double m) { return m; }, 1.0);
  CHECK(ex.back() == doctest::Approx(0.2 * std::exp(1.0)).epsilon(1e-9));
  CHECK(ex(0.5) == doctest::Approx(0.2 * std::exp(0.5)).epsilon(1e-8));
  const Curve lin = hat_M(0.1, [](double) { return 0.25; }, 2.0);
  CHECK(lin(1.3) == doctest::Approx(0.1 + 0.25 * 1.3).epsilon(1e-12));
  for (std::size_t i = 1; i < ex.y.size(); ++i) CHECK(ex.y[i] >= ex.y[i - 1]);
}

TEST_CASE("comparison system") {
  const Kinetics cell = cellulolytic2017_kinetics(0.0);
  const ComparisonCurves same = comparison_system(0.3, 0.5, 0.3, 0.5, cell, 1.0);
  for (std::size_t i = 0; i < same.t.size(); ++i) {
    CHECK(same.checkM[i] == same.hatM[i]);
    CHECK(same.checkS[i] == same.hatS[i]);
  }

  const ComparisonCurves cs = comparison_system(0.5, 1.0, 0.5, 1.0, cell, 3.0);
  REQUIRE(cs.hat_hit.has_value());
  // The stop level 1 - 1e-4 is reached slightly before M = 1.
  const double oracle = blowup_integral(0.5, 1.5) - blowup_integral(1.0 - kEtaStop, 1.5);
  CHECK(*cs.hat_hit == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(blowup_integral(0.5, 1.5) == doctest::Approx(1.617).epsilon(1e-3));

  const ComparisonCurves ord = comparison_system(0.1, 0.2, 0.4, 1.5, eberl2001_kinetics({}), 2.0);
  for (std::size_t i = 0; i < ord.t.size(); ++i) {
    CHECK(ord.checkM[i] <= ord.hatM[i] + 1e-14);
    CHECK(ord.checkS[i] <= ord.hatS[i] + 1e-14);
  }

  const ComparisonCurves decay = comparison_system(0.2, 0.5, 0.6, 2.0, cellulolytic2017_kinetics(1.0), 2.0);
  for (std::size_t i = 1; i < decay.t.size(); ++i) CHECK(decay.hatM[i] <= decay.hatM[i - 1] + 1e-15);
  CHECK_FALSE(decay.hat_hit.has_value());
}

TEST_CASE("envelope dominates the comparison upper curve") {
  const Kinetics k = eberl2001_kinetics({});
  const Curve env = hat_M(0.4, k.f_max, 2.0);
  const ComparisonCurves cs = comparison_system(0.1, 0.2, 0.4, 1.5, k, 2.0);
  for (std::size_t i = 0; i < cs.t.size(); ++i) CHECK(cs.hatM[i] <= env(cs.t[i]) + 1e-12);
}

TEST_CASE("monotonicity hypotheses are sampled") {
  Kinetics bad = cellulolytic2017_kinetics(0.0);
  bad.f0 = [](double m, std::span<const double> s) { return -s[0] * m; };
  CHECK_THROWS_AS(check_comparison_hypotheses(bad, 0.0, 1.0), MonotonicityViolation);
  CHECK_NOTHROW(check_comparison_hypotheses(cellulolytic2017_kinetics(0.2), 0.0, 2.0));
  CHECK_NOTHROW(check_comparison_hypotheses(eberl2001_kinetics({}), 0.0, 2.0));
}

TEST_CASE("classification rules") {
  const Classification a = classify({0.4, 2.0, -1.0, std::nullopt});
  CHECK(a.verdict == Verdict::BlowUpPredicted);
  CHECK(a.value == 0.4);
  const Classification b = classify({std::nullopt, 0.7, 0.1, std::nullopt});
  CHECK(b.verdict == Verdict::BoundedBy);
  CHECK(b.value == doctest::Approx(0.9));
  const Classification c = classify({std::nullopt, 1.0, 0.0, std::nullopt});
  CHECK(c.verdict == Verdict::Indeterminate);
  CHECK_FALSE(c.describe().empty());

  const Curve hat = hat_M(0.2, [](double m) { return 0.5 * m; }, 1.0);
  CHECK(delta_margin(hat) == doctest::Approx(1.0 - 0.2 * std::exp(0.5)).epsilon(1e-9));
}

TEST_CASE("Dirichlet barrier") {
  const StructuredGrid g(1, {256, 1}, {1.0, 1.0}, {true, true, false, false});
  const KirchhoffTransform phi(CoefficientLaw(PowerLaw{1.0}));
  const auto one = [](double) { return 1.0; };
  const Barrier b = barrier_delta(g, phi, one, hat_M(0.1, one, 0.2), 0.1);
  CHECK(b.c_hat == 1.0);
  CHECK(b.u_max == doctest::Approx(0.225).epsilon(1e-2));
  CHECK(b.delta == doctest::Approx(1.0 - std::sqrt(0.45)).epsilon(1e-3));

  const auto zero = [](double) { return 0.0; };
  const Barrier z = barrier_delta(g, phi, zero, hat_M(0.3, zero, 1.0), 0.3);
  CHECK(z.c_hat == 0.0);
  CHECK(z.delta == doctest::Approx(1.0 - std::sqrt(0.6)).epsilon(1e-9));

  const auto big = [](double) { return 20.0; };
  CHECK_THROWS_AS((void)barrier_delta(g, phi, big, hat_M(0.1, big, 0.1), 0.1), RangeError);

  const StructuredGrid neumann(1, {16, 1}, {1.0, 1.0});
  CHECK_THROWS_AS((void)barrier_delta(neumann, phi, one, hat_M(0.1, one, 0.2), 0.1),
                  SingularSystem);
}

TEST_CASE("constant-state blow-up time") {
  const auto t = constant_state_blowup_time(0.5, 1.0, 0.0);
  REQUIRE(t.has_value());
  const double c = 1.5;
  const double closed = (1.0 + c) / c * std::log(1.0 / 0.5) - std::log((c - 1.0) / (c - 0.5)) / c;
  CHECK(*t == doctest::Approx(closed).epsilon(1e-8));
  CHECK(*t == doctest::Approx(blowup_integral(0.5, c)).epsilon(1e-8));
  CHECK(*t == doctest::Approx(1.617).epsilon(1e-3));

  CHECK_FALSE(constant_state_blowup_time(0.3, 0.6, 0.0).has_value());
  const auto near = constant_state_blowup_time(0.999, 1.0, 0.0);
  REQUIRE(near.has_value());
  CHECK(*near < 5e-3);

  const auto slowed = constant_state_blowup_time(0.5, 1.0, 0.05);
  REQUIRE(slowed.has_value());
  CHECK(*slowed > *t);
  CHECK_FALSE(constant_state_blowup_time(0.5, 1.0, 1.0).has_value());
}
