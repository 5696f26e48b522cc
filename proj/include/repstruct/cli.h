// Command-line front end. Exit codes: 0 success, 1 usage, 2 data error.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace repstruct {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repstruct
