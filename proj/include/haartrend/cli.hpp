#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace haartrend {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numerical = 3 };

/// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
/// diagnostics and help on errors to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace haartrend
