#pragma once

#include <iosfwd>

namespace h8::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerify = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;

/// Entry point for h8tool. Human-readable lines go to out, diagnostics to
/// err; artifacts go to --out when given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace h8::cli
