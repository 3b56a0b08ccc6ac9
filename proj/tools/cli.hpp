#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crn::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Exit status: 0 success, 1 domain error or negative certificate, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crn::cli
