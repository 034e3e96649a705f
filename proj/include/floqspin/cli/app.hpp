#pragma once

namespace floqspin::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitComparison = 3 };

/// Command-line entry point; returns the process exit code.
int run_app(int argc, char** argv);

}  // namespace floqspin::cli
