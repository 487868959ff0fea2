#pragma once

#include <cstddef>
#include <functional>

namespace pilotwave {

/// Worker count: PILOTWAVE_WORKERS if set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
[[nodiscard]] std::size_t worker_count();

/// Calls body(i) for i in [0, n) on `workers` threads.  Items are handed out
/// in fixed contiguous blocks so callers that write result[i] get output that
/// does not depend on the worker count.  The first exception thrown by any
/// item is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace pilotwave
