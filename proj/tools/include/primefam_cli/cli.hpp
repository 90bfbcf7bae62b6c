// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace primefam::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kNonFinite = 4,
  kMismatch = 5,
};

/// Entry point of the `primefam` tool. Never throws; maps errors to ExitCode.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

/// Integer with optional scientific notation: "500000000", "5e8", "1.5e9".
/// Throws InvalidArgument when the value is not a non-negative integer that fits in 64 bits.
std::uint64_t parse_scale(std::string_view text);

/// Comma-separated list of parse_scale values.
std::vector<std::uint64_t> parse_scale_list(std::string_view text);

/// Compact label of a scale, e.g. 500000000 -> "5e8".
std::string scale_label(std::uint64_t v);

}  // namespace primefam::cli
