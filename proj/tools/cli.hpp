#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace displab::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,
    kDivergence = 3,
    kIo = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Messages go to `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace displab::cli
