#pragma once

#include <iosfwd>

namespace mfou::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kNumerical = 3,
  kGateFailed = 4,
};

/// Parses argv, runs the subcommand and maps every failure to an exit code.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfou::cli
