#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scaling::cli {

enum ExitCode : int { kSuccess = 0, kUserError = 1, kInternalError = 2 };

// Runs one scalestudy invocation. args[0] is the program name. Data goes to
// `out` only when no --out path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scaling::cli
