#pragma once

#include <iosfwd>

namespace khs {

/// Command-line entry point: subcommands convergence, nsph, radius-sweep,
/// breakeven, propagate and dump-rule. Returns the process exit code;
/// diagnostics go to `err`, results to `out` unless --out names a file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace khs
