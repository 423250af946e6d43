#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgakit {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitNotEquivalent = 1,
  kExitParseError = 2,
  kExitValidationError = 3,
  kExitBudgetExhausted = 4,
};

/// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgakit
