#pragma once

#include <ostream>

namespace sstedr::cli {

/// Process exit codes.
enum ExitCode : int {
  ok = 0,
  internal_error = 1,
  input_error = 2,
  insufficient_beats = 3,
  degenerate_sst = 4,
};

/// Runs the `sstedr` command line (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sstedr::cli
