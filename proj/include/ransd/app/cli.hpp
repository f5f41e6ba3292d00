#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ransd::app {

inline constexpr const char* kVersion = "1.0.0";

/// Parses `args` (without the program name), runs the command and returns the exit code:
/// 0 success, 2 usage or input error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ransd::app
