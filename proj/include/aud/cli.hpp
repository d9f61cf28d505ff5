#pragma once

namespace aud {

// Entry point for the `aud` binary. Subcommands: run, validate,
// calibrate-threshold, plot-data. Exit codes: 0 success, 2 configuration
// error, 3 runtime error.
int run_cli(int argc, char** argv);

}  // namespace aud
