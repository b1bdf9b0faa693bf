#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dcpm::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInvalidInput = 2,
  kInfeasible = 3,
  kNotConverged = 4,
};

/// Runs one `dcpm` command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dcpm::cli
