#pragma once

#include <iosfwd>

namespace stirap::cli {

enum ExitCode : int {
    kOk = 0,
    kGateMismatch = 2,
    kAccuracyFailure = 3,
    kConfigError = 4,
};

/// Entry point of the `stirap` executable; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stirap::cli
