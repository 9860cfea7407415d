#pragma once

#include <cstddef>
#include <functional>

namespace hsfuse {

// Process-wide cap on worker threads used by per-band loops. 0 or 1 means
// run inline on the calling thread.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs fn(0) .. fn(count-1). Iterations must be independent; each index is
// processed by exactly one worker, so per-index results do not depend on the
// thread count. The first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace hsfuse
