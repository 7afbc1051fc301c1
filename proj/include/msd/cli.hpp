#pragma once

#include <string>
#include <vector>

namespace msd {

/// Parse and run one CLI invocation. `args` excludes the program name.
/// Returns the process exit code: 0 success, 2 usage error, 3 data error,
/// 4 numerical error.
int run_cli(const std::vector<std::string>& args);

}  // namespace msd
