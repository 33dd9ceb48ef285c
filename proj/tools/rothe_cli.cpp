#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rothe/commands.hpp"
#include "rothe/errors.hpp"
#include "rothe/verify.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  int snapshots = -1;
  bool dump_newton = false;

  [[nodiscard]] rothe::RunOptions options() const {
    rothe::RunOptions o;
    if (!out.empty()) o.out_dir = out;
    if (snapshots >= 0) o.snapshots = snapshots;
    o.dump_newton = dump_newton;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_run_flags) {
  cmd->add_option("config", c.config, "Scenario file")->required();
  cmd->add_option("--out", c.out, "Output directory (overrides [output] dir)");
  if (with_run_flags) {
    cmd->add_option("--snapshots", c.snapshots, "Write field snapshots every K steps")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--dump-newton", c.dump_newton, "Write every Newton iterate");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rothe solver for degenerate biofilm growth with coupled substrates"};
  app.require_subcommand(1);

  Common run_opts, bounds_opts, conv_opts, reg_opts;
  auto* run = app.add_subcommand("run", "Simulate a scenario");
  add_common(run, run_opts, true);
  auto* bounds = app.add_subcommand("bounds", "Comparison envelopes and blow-up classification");
  add_common(bounds, bounds_opts, false);
  auto* conv = app.add_subcommand("converge", "Refinement study against an oracle");
  add_common(conv, conv_opts, false);
  std::string axis = "h";
  int levels = 4;
  conv->add_option("--axis", axis, "tau | h | eps")->check(CLI::IsMember({"tau", "h", "eps"}));
  conv->add_option("--levels", levels, "Number of refinement levels")->check(CLI::Range(2, 8));
  auto* reg = app.add_subcommand("regularity", "Weighted gradient functional and front exponent");
  add_common(reg, reg_opts, false);
  auto* verify = app.add_subcommand("verify", "Built-in property suites");
  std::vector<std::string> suites;
  verify->add_option("suites", suites, "Suite names or 'all'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rothe::kExitUsage;
  }

  try {
    if (*run) return rothe::cmd_run(run_opts.config, run_opts.options(), std::cout);
    if (*bounds) return rothe::cmd_bounds(bounds_opts.config, bounds_opts.options(), std::cout);
    if (*conv) {
      return rothe::cmd_converge(conv_opts.config, axis, levels, conv_opts.options(), std::cout);
    }
    if (*reg) return rothe::cmd_regularity(reg_opts.config, reg_opts.options(), std::cout);
    if (*verify) return rothe::cmd_verify(suites, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rothe::exit_code_for(e);
  }
  return rothe::kExitUsage;
}
