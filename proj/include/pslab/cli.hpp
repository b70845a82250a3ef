#pragma once

#include <string>
#include <vector>

namespace pslab::cli {

// Dispatches one subcommand; argv excludes the program name.
// Exit codes: 0 success, 2 argument error, 3 construction failed, 4 resource error.
int run(const std::vector<std::string>& argv);

}  // namespace pslab::cli
