#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lmlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitInput = 2;

// Runs the command line `args` (args[0] is the program name) and returns the
// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmlab::cli
