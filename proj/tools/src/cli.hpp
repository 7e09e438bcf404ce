#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpbayes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitInternal = 3;

/// Version string baked in at configure time (git describe, or the project version).
const char* version();

/// Full command-line entry point; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpbayes::cli
