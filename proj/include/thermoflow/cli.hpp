#pragma once

#include <iosfwd>

namespace thermoflow {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_runtime_error = 1, exit_config_error = 2 };

/// Entry point of the `thermoflow` tool. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermoflow
