#pragma once

#include <iosfwd>

namespace learnpath {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitUnknownTerm = 2,
  kExitNoPath = 3,
  kExitOracleGuard = 4,
  kExitPort = 5,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace learnpath
