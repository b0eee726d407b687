#pragma once

#include <iosfwd>

namespace ntb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

/// Runs one `ntb` invocation. Results go to files under --out; summaries to
/// `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ntb::cli
