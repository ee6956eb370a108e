#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgprobe::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,    // bad arguments, config, input files or templates
  kExitNetwork = 3,  // endpoint unreachable, probe failures, cache I/O
  kExitNumeric = 4,  // divergence, non-convergence, invalid parameters for a solver
};

/// Runs one subcommand; args excludes the program name. Errors are reported
/// on `err` and mapped to an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgprobe::cli
