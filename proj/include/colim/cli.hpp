#pragma once

#include <iosfwd>

namespace colim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// colim <subcommand> [--config PATH] [--seed N] [--out PATH | --out-dir DIR] [flags]
/// Subcommands: simulate, estimate-lim, estimate-colored, oracle, bench, sweep.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace colim::cli
