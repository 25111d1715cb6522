#pragma once

#include <cstddef>
#include <functional>

namespace displab {

/// Worker count: DISPLAB_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n), split into contiguous chunks across
/// thread_count() threads. Each index is visited exactly once, so results
/// written to per-index slots do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace displab
