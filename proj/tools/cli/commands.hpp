#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lipext::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kInputError = 1, kCheckFailed = 2 };

/// Runs the command line `args` (program name excluded). Reports and errors go
/// to `out` as JSON; human-readable tables (demo) also go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from LIPEXT_THREADS, defaulting to the hardware concurrency.
unsigned thread_cap();

}  // namespace lipext::cli
