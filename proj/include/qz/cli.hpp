#pragma once

#include <string>
#include <vector>

namespace qz::cli {

/// Runs one CLI command (psd, corr, zone1d, zone2d, oracle) with the given
/// argument list (excluding the program name). Returns the process exit
/// code: 0 success, 1 configuration error, 2 validation/tolerance failure.
int run(const std::vector<std::string>& args);

} // namespace qz::cli
