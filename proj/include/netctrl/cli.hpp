#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace netctrl {
namespace cli {

// Exit codes: 0 Controllable, 1 Uncontrollable, 2 Inconclusive, 64 usage
// error, 65 parse/validation error, 70 internal inconsistency. Reports go to
// `out` (stdout), diagnostics to `err` (stderr); malformed input never
// escapes as an exception.
inline constexpr int kExitControllable = 0;
inline constexpr int kExitUncontrollable = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInput = 65;
inline constexpr int kExitInternal = 70;

int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace cli
}  // namespace netctrl
