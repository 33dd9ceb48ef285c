#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "rothe/errors.hpp"
#include "rothe/grid.hpp"
#include "rothe/linalg.hpp"

using namespace rothe;

namespace {

Field random_field(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(n);
  for (auto& v : f) v = d(rng);
  return f;
}

}  // namespace

TEST_CASE("diffusion of a constant with Neumann walls vanishes") {
  const StructuredGrid g(2, {5, 4}, {1.0, 2.0});
  const Field u(g.cells(), 3.7);
  for (double v : apply_diffusion(g, u, 0.0)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("1D hand stencil") {
  const StructuredGrid g(1, {3, 1}, {3.0, 1.0});
  const Field r = apply_diffusion(g, Field{0.0, 1.0, 0.0}, 0.0);
  CHECK(r[0] == doctest::Approx(-1.0));
  CHECK(r[1] == doctest::Approx(2.0));
  CHECK(r[2] == doctest::Approx(-1.0));
}

TEST_CASE("linear data with matching Dirichlet trace is discrete-harmonic") {
  // u = x with ghost value Phi(h0) would need two traces; use a symmetric
  // profile so both ends see the same boundary value.
  const StructuredGrid g(1, {10, 1}, {1.0, 1.0}, {true, true, false, false});
  Field u(g.cells());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.25;
  for (double v : apply_diffusion(g, u, 0.25)) CHECK(std::abs(v) < 1e-13);
  // Linear interior, Neumann ends: interior cells see zero net flux.
  const StructuredGrid gn(1, {10, 1}, {1.0, 1.0});
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * gn.center(i)[0] + 1.0;
  const Field r = apply_diffusion(gn, u, 0.0);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) CHECK(std::abs(r[i]) < 1e-10);
}

TEST_CASE("Dirichlet boundary of the M operator uses the half-cell distance") {
  const StructuredGrid g(1, {4, 1}, {1.0, 1.0}, {true, false, false, false});
  const double h = 0.25;
  const Field u(4, 1.0);
  const Field r = apply_diffusion(g, u, 0.0);
  CHECK(r[0] == doctest::Approx(2.0 / (h * h)));
  CHECK(r[1] == doctest::Approx(0.0));
}

TEST_CASE("diffusion conserves with Neumann walls and is symmetric PSD") {
  const StructuredGrid g(2, {6, 5}, {1.0, 1.0});
  const Field u = random_field(g.cells(), 3);
  const Field r = apply_diffusion(g, u, 0.0);
  double sum = 0.0;
  for (double v : r) sum += v;
  CHECK(std::abs(sum) < 1e-10);

  const StructuredGrid small(2, {4, 3}, {1.0, 1.0}, {true, false, true, false});
  const std::size_t n = small.cells();
  const AffineOperator op = diffusion_operator(small, small.gamma1(), 0.0);
  std::vector<std::vector<double>> A(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Field e(n, 0.0);
    e[j] = 1.0;
    const Field col = op.A.apply(e);
    for (std::size_t i = 0; i < n; ++i) A[i][j] = col[i];
  }
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) asym = std::max(asym, std::abs(A[i][j] - A[j][i]));
  }
  CHECK(asym < 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const Field x = random_field(n, 100 + static_cast<std::uint64_t>(trial));
    const Field y = op.A.apply(x);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += x[i] * y[i];
    CHECK(q >= -1e-12);
  }
}

TEST_CASE("harmonic face averaging") {
  const StructuredGrid g(1, {2, 1}, {2.0, 1.0});
  const Field coeff{1.0, 3.0};
  const AffineOperator op = diffusion_operator(g, kAllNeumann, 0.0, coeff);
  const Field r = op.apply(Field{1.0, 0.0});
  // Harmonic mean of 1 and 3 is 1.5.
  CHECK(r[0] == doctest::Approx(1.5));
  CHECK(r[1] == doctest::Approx(-1.5));
}

TEST_CASE("upwind advection examples") {
  const StructuredGrid g(1, {2, 1}, {2.0, 1.0});
  const FaceVelocity zero = uniform_velocity(g, {0.0, 0.0});
  for (double v : apply_advection_upwind(g, Field{1.0, 2.0}, zero, 0.0)) CHECK(v == 0.0);
  const FaceVelocity one = uniform_velocity(g, {1.0, 0.0});
  const Field r = apply_advection_upwind(g, Field{1.0, 0.0}, one, 0.0);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(-1.0));

  // A constant field in a uniform flow is stationary in interior cells.
  const StructuredGrid g2(2, {5, 5}, {1.0, 1.0});
  const FaceVelocity v2 = uniform_velocity(g2, {0.3, -0.7});
  const Field c(g2.cells(), 2.0);
  const Field rc = apply_advection_upwind(g2, c, v2, 2.0);
  for (std::size_t i = 0; i < rc.size(); ++i) CHECK(std::abs(rc[i]) < 1e-12);
}

TEST_CASE("explicit upwind update preserves positivity under the CFL bound") {
  const StructuredGrid g(2, {8, 6}, {1.0, 1.0});
  const FaceVelocity v = uniform_velocity(g, {0.9, -0.4});
  const Field s = random_field(g.cells(), 9, 0.0, 1.0);
  const double tau = std::min(g.h(0), g.h(1)) / (max_speed(v) * 2.0);
  const Field a = apply_advection_upwind(g, s, v, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] - tau * a[i] >= -1e-15);
}

TEST_CASE("integrals and norms") {
  const StructuredGrid unit(2, {4, 4}, {1.0, 1.0});
  CHECK(integrate(unit, Field(unit.cells(), 1.0), Norm::Mass) == doctest::Approx(1.0));
  CHECK(integrate(unit, Field(unit.cells(), -2.0), Norm::L1) == doctest::Approx(2.0));
  const StructuredGrid g(1, {2, 1}, {1.0, 1.0});
  const Field f{1.0, 3.0};
  CHECK(integrate(g, f, Norm::Mass) == doctest::Approx(2.0));
  CHECK(integrate(g, f, Norm::Max) == 3.0);
  CHECK(integrate(g, f, Norm::Min) == 1.0);
  CHECK(integrate(g, f, Norm::L2) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("gradient energy equals u^T L u") {
  const StructuredGrid g(2, {5, 4}, {1.0, 0.8}, {false, true, false, true});
  const Field u = random_field(g.cells(), 21);
  const AffineOperator op = diffusion_operator(g, g.gamma1(), 0.0);
  const Field lu = op.A.apply(u);
  double q = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) q += u[i] * lu[i];
  CHECK(gradient_energy(g, u, g.gamma1(), 0.0) == doctest::Approx(q * g.cell_volume()));
}

TEST_CASE("non-finite fields are rejected") {
  const StructuredGrid g(1, {3, 1}, {1.0, 1.0});
  CHECK_THROWS((void)apply_diffusion(g, Field{0.0, NAN, 1.0}, 0.0));
  CHECK_THROWS((void)integrate(g, Field{0.0, INFINITY, 1.0}, Norm::Mass));
}

TEST_CASE("snapshot round trip") {
  const StructuredGrid g(2, {3, 2}, {1.5, 1.0});
  const Field f = random_field(g.cells(), 4);
  std::stringstream io;
  write_snapshot(io, g, f, 0.125);
  const std::string header = io.str().substr(0, io.str().find('\n'));
  CHECK(header.rfind("2 3 2 ", 0) == 0);
  const Snapshot s = read_snapshot(io);
  CHECK(s.dim == 2);
  CHECK(s.n[0] == 3);
  CHECK(s.n[1] == 2);
  CHECK(s.h[0] == doctest::Approx(0.5));
  CHECK(s.time == 0.125);
  REQUIRE(s.values.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(s.values[i] == f[i]);
}

TEST_CASE("linear solvers agree") {
  const StructuredGrid g1(1, {50, 1}, {1.0, 1.0}, {true, true, false, false});
  AffineOperator op = diffusion_operator(g1, g1.gamma1(), 0.0);
  op.A.add_diagonal(Field(g1.cells(), 1.0));
  const Field b = random_field(g1.cells(), 2);
  const Field x = linalg::solve_tridiagonal(op.A, b);
  const Field r = op.A.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-10));

  const StructuredGrid g2(2, {12, 10}, {1.0, 1.0}, {true, false, false, false});
  AffineOperator op2 = diffusion_operator(g2, g2.gamma1(), 0.0);
  op2.A.add_diagonal(Field(g2.cells(), 0.1));
  const Field b2 = random_field(g2.cells(), 8);
  Field xc(g2.cells(), 0.0), xb(g2.cells(), 0.0);
  linalg::pcg(op2.A, b2, xc, 1e-12);
  linalg::bicgstab(op2.A, b2, xb, 1e-12);
  double diff = 0.0;
  for (std::size_t i = 0; i < xc.size(); ++i) diff = std::max(diff, std::abs(xc[i] - xb[i]));
  CHECK(diff < 1e-8);
  const Field ax = op2.A.apply(xc);
  Field res(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) res[i] = ax[i] - b2[i];
  CHECK(linalg::norm2(res) <= 1e-10);
}
