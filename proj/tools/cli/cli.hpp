#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace georoute::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Full command-line entry point. Diagnostics go to `err`, summaries to `out`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Expands `x`, `a,b,c` or `start:stop:log10` into density values.
/// Throws std::invalid_argument with a "lambda: ..." message.
std::vector<double> expand_sweep(std::string_view spec);

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace georoute::cli
