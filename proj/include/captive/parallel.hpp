#pragma once

#include <cstddef>
#include <functional>

namespace captive {

/// Environment variable overriding the default worker count.
inline constexpr const char* kWorkersEnv = "CAPTIVE_WORKERS";

/// CAPTIVE_WORKERS if set to a positive integer, else hardware concurrency.
std::size_t default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Callers write
/// results into per-index slots, so the outcome never depends on scheduling.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace captive
