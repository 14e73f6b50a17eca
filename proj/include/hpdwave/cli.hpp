// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <iosfwd>
#include <string_view>

#include "hpdwave/simulate.hpp"

namespace hpdwave::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kIo = 3, kPipeline = 4 };

/// Runs `hpdwave <subcommand> ...`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses the key=value benchmark configuration. Required keys: spectrum, d,
/// T, replicates, seed. Throws InvalidArgument naming the offending key.
BenchmarkConfig parse_benchmark_config(std::string_view text);

}  // namespace hpdwave::cli
