#pragma once

#include <iosfwd>

namespace nekh::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3 };

/// Entry point of the `nekh` tool; data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nekh::cli
