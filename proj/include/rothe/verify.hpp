#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rothe {

struct CheckResult {
  std::string suite;
  std::string check;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
};

/// max-principle, contraction, sandwich, conservation, regularity.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite on its built-in scenarios. Throws ConfigError for an
/// unknown name.
std::vector<CheckResult> run_verify_suite(const std::string& name);

/// Runs the named suites ("all" expands to every suite) and prints a
/// pass/fail table. Returns 0 when every check passes, 1 otherwise and 4 for
/// an unknown suite name.
int cmd_verify(const std::vector<std::string>& suites, std::ostream& out);

}  // namespace rothe
