#pragma once

#include <ostream>

namespace infopatch::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kIoError = 3,
};

/// Entry point for the `infopatch` tool. Subcommands: degrade, score, sample,
/// crop, heatmap, bench, run.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infopatch::cli
