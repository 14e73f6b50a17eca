// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace hpdwave {

/// Worker count: HPDWAVE_THREADS if set and positive, otherwise the hardware
/// concurrency (0 in the variable also means "auto").
unsigned thread_count();

/// Runs body(i) for i in [0, n). Iterations are split into contiguous blocks,
/// one per worker; the first exception thrown by any worker is rethrown.
/// Falls back to a plain loop when n < min_parallel or one worker is available.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_parallel = 2);

}  // namespace hpdwave
