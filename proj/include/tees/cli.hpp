#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tees::cli {

// Exit codes of the tees executable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;       // error.json written when --out is known
inline constexpr int kExitViolations = 2;  // validate found infeasible steps
inline constexpr int kExitUsage = 64;

// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tees::cli
