#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace nebv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation: missing or inconsistent flags, unreadable inputs named on
/// the command line.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs the command line `args` (without the program name). Diagnostics go to
/// `err`, progress to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nebv::cli
