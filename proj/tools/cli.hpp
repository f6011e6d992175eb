#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shl::cli {

/// Parses args (args[0] is the program name), runs the subcommand and returns
/// the exit code: 0 every report PASS (or not applicable), 1 any FAIL,
/// 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shl::cli
