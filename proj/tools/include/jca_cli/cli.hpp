#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that replaces the default output directory.
inline constexpr const char* kOutputDirEnv = "JCA_OUTPUT_DIR";

/// Runs `jca <subcommand> ...` with `args` excluding the program name.
/// Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jca::cli
