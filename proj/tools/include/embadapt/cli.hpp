#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace embadapt::cli {

/// Exit codes of the `embadapt` tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,        // runtime failure (bad data, I/O, divergence)
    exit_usage = 2,        // invalid flags or arguments
    exit_cells_failed = 3, // compare finished but some cells failed
};

/// Runs the tool with `args` (without the program name) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace embadapt::cli
