#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the command line `args` (without the program name). Data goes to
/// files or `out`; logs and error messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccg::cli
