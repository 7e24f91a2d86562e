#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waitsee::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kConvergence = 3,
  kUsage = 64,
  kIo = 74,
};

/// Runs one subcommand (evaluate, optimize, bound, simulate, sweep). `args`
/// excludes the program name. Documents go to `out` unless --out is given.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Full-precision decimal used for every CSV cell.
std::string format_full(double v);

}  // namespace waitsee::cli
