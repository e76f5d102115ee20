#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tomoforge::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitDivergence = 4 };

/// Runs the tomoforge command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tomoforge::cli
