#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace dense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Parses argv (argv[0] is the program name), runs one subcommand and writes
// its result document to `out` or to --output. Diagnostics and progress go
// to `err`. Returns 0, 1 (runtime error) or 2 (usage error).
int run(std::span<const std::string> argv, std::ostream& out, std::ostream& err);

}  // namespace dense::cli
