#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rbsn::cli {

enum ExitCode : int {
    ok = 0,
    config_error = 1,
    generation_error = 2,
    solver_error = 3,
    io_error = 4,
    verification_failed = 5,
};

/// Runs the command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbsn::cli
