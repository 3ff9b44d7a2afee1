#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rnntc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericError = 3;

/// Entry point for the `rnntc` command line: prepare, train, evaluate,
/// predict, compare. `args` excludes the program name. Returns the process
/// exit code (0 ok, 2 input error, 3 numeric failure).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rnntc
