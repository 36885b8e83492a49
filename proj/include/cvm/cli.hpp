#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvm {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

/// Entry point of the `cvm` tool. args[0] is the program name. Errors are
/// reported on `err` as a single JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cvm
