#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace abrupt::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "ABRUPT_OUT_DIR";

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

// Full command-line entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abrupt::cli
