#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ucompare::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,              // bad flags, unreadable or malformed data
  kExitInsufficientSample = 2, // n < 2g + 2 with variance requested
  kExitDegenerate = 3,         // no decision: the variance estimate is not positive
};

/// Runs the command line. The report goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One invariant evaluated on one built-in scenario.
struct OracleResidual {
  std::string scenario;
  std::string invariant;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return residual <= tolerance; }
};

struct OracleCheckOptions {
  /// Replace the unbiased theta^2 estimate with the plug-in delta_hat^2.
  bool inject_biased_theta2 = false;
  /// Empty runs every scenario.
  std::string scenario;
};

std::vector<std::string> oracle_scenario_names();
std::vector<OracleResidual> run_oracle_checks(const OracleCheckOptions& options);

}  // namespace ucompare::cli
