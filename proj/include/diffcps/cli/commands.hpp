#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diffcps::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `diffcps` tool: verbs gen-data, train, eval. `args`
/// excludes the program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diffcps::cli
