#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mavpoint {

// Exit codes: 0 success, 1 internal error, 2 usage/validation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the `mavpoint` executable. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mavpoint
