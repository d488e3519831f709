#pragma once

#include <string>
#include <vector>

namespace hawkes::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;      // validation / configuration errors
inline constexpr int kExitNoConvergence = 3;  // iteration cap hit; result still written

/// Runs the batch front end (subcommands: simulate, fit, classify, eval)
/// and returns the process exit code. Arguments exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace hawkes::cli
