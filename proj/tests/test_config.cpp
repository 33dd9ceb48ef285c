#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "rothe/barenblatt.hpp"
#include "rothe/config.hpp"
#include "rothe/errors.hpp"

using namespace rothe;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMonod = R"(
# two-dimensional Monod scenario
[domain]
dim = 2
extent = 1.0 0.5
n = 16 8
gamma1 = left, top
h0 = 0.2

[time]
T = 0.5
N = 50

[regularization]
eps = 1e-2 1e-3

[model]
preset = eberl2001
law = singular
d2 = 0.5
a = 1.5
k2 = 0.2

[substrate]
nu = 1
D = power 2 1 0.1
v = 0.5 0
h = 1
S0 = constant 1

[initial]
M0 = bump 0.5 0.2 0.01 0.3 0.25

[solver]
tol_newton = 1e-9
mode = banach
theta_c = 0.4
)";

}  // namespace

TEST_CASE("full scenario parses") {
  const ScenarioConfig c = parse_config(kMonod, "monod.ini");
  CHECK(c.dim == 2);
  CHECK(c.n[0] == 16);
  CHECK(c.n[1] == 8);
  CHECK(c.extent[1] == 0.5);
  CHECK(c.gamma1[0]);
  CHECK_FALSE(c.gamma1[1]);
  CHECK(c.gamma1[3]);
  CHECK(c.h0 == 0.2);
  CHECK(c.N == 50);
  REQUIRE(c.eps.size() == 2);
  CHECK(c.eps[1] == 1e-3);
  CHECK(c.eberl.k2 == 0.2);
  REQUIRE(c.substrates.size() == 1);
  CHECK(c.substrates[0].nu == 1.0);
  CHECK(std::holds_alternative<SubstrateOwnDiffusion>(c.substrates[0].D));
  CHECK(c.coupling.mode == CouplingMode::Banach);
  CHECK(c.coupling.theta_c == 0.4);
  CHECK(c.elliptic.tol_newton == 1e-9);

  const ProblemSpec p = c.build_problem();
  CHECK(p.grid.cells() == 128);
  CHECK(p.k() == 1);
  CHECK(p.M0[0] == doctest::Approx(0.01));
  CHECK(*std::max_element(p.M0.begin(), p.M0.end()) <= 0.51);
}

TEST_CASE("errors carry the line number") {
  CHECK(error_of("[domain]\ndim = 1\n[bogus]\n").find("cfg:3") != std::string::npos);
  CHECK(error_of("[domain]\ndim = 1\nwidth = 2\n").find("cfg:3") != std::string::npos);
  CHECK(error_of("[domain]\ndim = 1\ndim = 2\n").find("cfg:3") != std::string::npos);
  CHECK(error_of("[time]\nT =\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[time]\nthis line has no equals sign\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[time]\nN = many\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[model]\npreset = pme\nlambda = 0.1\n").find("cfg:3") != std::string::npos);
  CHECK_FALSE(error_of("[time]\nN = 10 ; trailing comment\n").find("cfg") != std::string::npos);
}

TEST_CASE("preset constraints") {
  CHECK_THROWS_AS(parse_config("[model]\npreset = eberl2001\n").build_problem(), ConfigError);
  const ScenarioConfig pme = parse_config("[model]\npreset = pme\na = 2\n[domain]\nn = 8\n");
  CHECK(std::holds_alternative<PowerLaw>(pme.make_law().kind()));
  const ProblemSpec p = pme.build_problem();
  CHECK(p.k() == 0);
  CHECK_THROWS_AS(parse_config("[domain]\nh0 = 1.5\ngamma1 = all\n").build_problem(), InvalidProblem);
  CHECK_THROWS_AS(parse_config("[regularization]\neps = 1e-3 1e-2\n"), ConfigError);
}

TEST_CASE("initial data kinds") {
  const StructuredGrid g(1, {10, 1}, {1.0, 1.0});
  const Field step = make_initial_field({"step", {0.1, 0.6, 0.5}, ""}, g, ".");
  CHECK(step.front() == 0.1);
  CHECK(step.back() == 0.6);
  const Field r1 = make_initial_field({"random", {0.0, 0.5, 7}, ""}, g, ".");
  const Field r2 = make_initial_field({"random", {0.0, 0.5, 7}, ""}, g, ".");
  CHECK(r1 == r2);
  for (double v : r1) CHECK((v >= 0.0 && v <= 0.5));

  const auto dir = std::filesystem::temp_directory_path() / "rothe_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "m0.txt");
    write_snapshot(f, g, step, 0.0);
  }
  const Field back = make_initial_field({"file", {}, "m0.txt"}, g, dir);
  CHECK(back == step);
  CHECK_THROWS(make_initial_field({"file", {}, "missing.txt"}, g, dir));
  std::filesystem::remove_all(dir);

  const ScenarioConfig bc = parse_config("[model]\npreset = pme\n[initial]\nM0 = barenblatt\n[time]\nT = 0.1\n");
  const Barenblatt b = bc.barenblatt();
  CHECK(b.peak(bc.oracle_t0) <= 0.8 + 1e-12);
  CHECK(b.support_radius(bc.oracle_t0 + bc.T) == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("load_config reads from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "rothe_config_load";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "s.ini");
    f << kMonod;
  }
  const ScenarioConfig c = load_config(dir / "s.ini");
  CHECK(c.base_dir == dir);
  CHECK_THROWS_AS((void)load_config(dir / "absent.ini"), ConfigError);
  std::filesystem::remove_all(dir);
}
