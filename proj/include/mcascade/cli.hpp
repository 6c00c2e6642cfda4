#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcascade {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitAssumption = 3,
    kExitNumeric = 4,
    kExitResource = 5,
};

/// One command-line invocation (args excludes the program name). Tables and
/// the run manifest go to the --out directory, a short summary to `out`,
/// and on failure a one-line JSON error record to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcascade
