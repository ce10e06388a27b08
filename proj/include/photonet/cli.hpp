#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace photonet {

/// Runs the command-line tool in-process. args excludes the program name.
/// Returns the process exit code: 0 success, 2 I/O, 64 usage, 65 data.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace photonet
