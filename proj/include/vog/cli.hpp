#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vog {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitIo = 2,
    kExitQualityGate = 3,
};

/// Parses and runs one vogtool invocation. argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace vog
