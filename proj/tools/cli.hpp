#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pemwe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;   // bad arguments, config or input files
inline constexpr int kExitSolver = 3;  // the simulation or fit itself failed

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// argv[0] is supplied internally.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pemwe::cli
