#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srd::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

/// Runs the `srd` command line. `args` excludes the program name. Data goes
/// to `out` (unless --out names a file), log lines go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srd::cli
