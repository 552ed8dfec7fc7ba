#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chinpaint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNotConverged = 3;

// Entry point of the inpainting tool. args[0] is the program name.
// Diagnostics go to err; exit codes: 0 success, 2 invalid input, 3 solver did not converge
// (outputs are still written).
int cli_main(const std::vector<std::string>& args, std::ostream& err);

}  // namespace chinpaint
