#pragma once

#include <ostream>

namespace compfdp::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,
    kDataError = 3,
    kConfigError = 4,
};

/// Runs one `compfdp` subcommand. Reports and data go to files or `out`;
/// diagnostics go to `err` as a single line.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace compfdp::cli
