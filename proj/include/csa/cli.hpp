#pragma once

#include <iosfwd>

namespace csa::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

// Entry point of the csa tool. Diagnostics are one line on `err`, short
// summaries go to `out`. Results land in --out, or $CSA_OUT_DIR, or ".".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace csa::cli
