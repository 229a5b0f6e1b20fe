#pragma once

#include <cstddef>
#include <functional>

namespace rydkcm {

/// Worker count: RYDKCM_THREADS if set and positive, else the hardware count.
int thread_count();

/// Calls fn(i) for i in [0, n) on thread_count() workers. Each index runs
/// exactly once; results must be written to per-index slots by the caller.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rydkcm
