#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpinterp::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kNotFound = 2,
  kInputError = 3,
  kResidualExceeded = 4,
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpinterp::cli
