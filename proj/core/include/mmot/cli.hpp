#pragma once

#include <string>
#include <vector>

namespace mmot {

/// Command-line front door shared by the mmot binary and the tests.
/// Subcommands: solve, karcher, verify, gen. Exit codes: 0 success,
/// 1 verification failure, 2 configuration error, 3 solver error.
int run_cli(const std::vector<std::string>& args);

}  // namespace mmot
