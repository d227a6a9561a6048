#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace safeprob::cli {

// Exit codes: 0 the queried notion holds (or the demo's assertions pass),
// 1 it fails, 2 usage or input error.
inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitError = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace safeprob::cli
