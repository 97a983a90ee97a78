#pragma once

#include <iosfwd>

namespace probevol {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,         ///< unknown subcommand or malformed command line
  kExitBadParameter = 3,  ///< missing or invalid parameter value
  kExitIo = 4,            ///< file could not be read, parsed or written
  kExitComputation = 5,   ///< numerical failure during evaluation
};

/// Runs the tool. Results go to out; failures are reported on err as a
/// single-line JSON object {"error": {"kind", "message", "exit_code"}}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace probevol
