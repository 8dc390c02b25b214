#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace central_approx {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     ///< selftest found a failing criterion
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Reports go to
/// `out` or to the --out file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace central_approx
