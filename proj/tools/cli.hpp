#pragma once

#include <iosfwd>

namespace surecost::cli {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kInfeasible = 2,
  kUnconverged = 3,
};

/// Parses argv and runs one subcommand. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace surecost::cli
