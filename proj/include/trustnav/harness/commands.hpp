#pragma once

#include <iosfwd>

namespace trustnav::harness {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitInput = 2 };

/// The trustnav command line: generate, analyze, decide, evaluate, simulate,
/// attack and report. Returns the process exit code; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trustnav::harness
