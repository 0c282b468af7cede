#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "netest/error.hpp"

namespace netest {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,          // parse errors, invalid input, size guards
  kExitInfeasible = 3,     // also singular discretization factors
  kExitUnsupported = 4,
  kExitVerification = 5,
};

int exit_code_for(ErrorKind kind);

/// Runs the command line without the program name, e.g.
/// {"design", "--input", "spec.json"}. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace netest
