#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpwm::cli {

enum ExitCode : int {
    Ok = 0,
    Failure = 1,
    ConfigFailure = 2,
    InfeasibleDesignFailure = 3,
    EstimationFailure = 4,
    Usage = 64,
};

// args excludes the program name. CSV goes to --out when given, otherwise to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fpwm::cli
