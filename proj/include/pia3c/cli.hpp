#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pia3c {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitRuntime = 3,
};

/// Runs one command. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pia3c
