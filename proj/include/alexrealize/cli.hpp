#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alexrealize {

enum ExitCode : int { kExitPass = 0, kExitVerificationFailure = 1, kExitUsage = 2 };

/// Runs the command line tool; args[0] is the program name. Caps come from
/// the ALEXREALIZE_CAP_* environment variables.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alexrealize
