#pragma once

#include <iostream>

namespace l0fgl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;
inline constexpr int kExitSolverFailure = 3;

/// Entry point of the l0fgl command-line tool. Results go to --out or `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace l0fgl::cli
