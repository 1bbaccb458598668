#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmerl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point behind the qmerl executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmerl::cli
