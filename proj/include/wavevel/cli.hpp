#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavevel {

/// Command-line driver. `args` excludes the program name.
/// Exit codes: 0 success, 1 a check failed, 2 usage or input error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace wavevel
