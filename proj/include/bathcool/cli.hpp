#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bathcool::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInvalidArguments = 2,
  kToleranceFailure = 3,
};

/// Runs one `bathcool` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bathcool::cli
