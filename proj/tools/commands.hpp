#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eigenopt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kVerificationFailure = 2,
  kNumericalFailure = 3,
};

/// Entry point shared by the eigenopt executable and the tests. args[0] is
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigenopt::cli
