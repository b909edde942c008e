#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fot::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Entry point shared by the `fot` binary and the CLI tests. Machine-readable
/// results go to `out` (JSON), progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fot::cli
