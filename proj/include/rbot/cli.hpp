#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rbot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInternal = 2;
inline constexpr int kExitSizeGuard = 3;

// args excludes the program name. Documents go to --out (or `out` when no
// --out is given); diagnostics and wall time go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "p/q", an integer or a decimal. Throws ParseError.
double parse_rational(const std::string& text);

}  // namespace rbot
