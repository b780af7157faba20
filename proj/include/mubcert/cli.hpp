#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mubcert {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitArgs = 2,
  kExitConfig = 3,
  kExitData = 4,
};

inline constexpr const char* kToolVersion = "0.3.0";

/// Runs the command line `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mubcert
