#pragma once

// Batch driver. Every subcommand validates its parameters, dispatches to the
// library and writes JSON or CSV to `out` (or --output). On failure a single
// JSON error object {"error": <code>, "message": ...} goes to `err`.
//
// Exit codes: 0 ok, 1 a property or acceptance check failed, 2 bad
// configuration, 3 violated precondition, 4 budget exceeded.

#include "ergolab/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ergolab::cli {

enum Exit : int { Ok = 0, CheckFailed = 1, Config = 2, Precondition = 3, Budget = 4 };

Exit exit_code(ErrorCode code) noexcept;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ergolab::cli
