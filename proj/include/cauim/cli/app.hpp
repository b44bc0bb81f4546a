#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cauim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitBudget = 3;

// Entry point for `cauim <command> [options]`; `args` excludes the program
// name. Every command also takes `--config FILE`: a flat `key = value` file
// whose keys are long option names without the dashes. '#' starts a comment
// line. Values from the file are applied first, so options given on the
// command line win.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cauim::cli
