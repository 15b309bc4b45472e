#pragma once

#include <cstddef>
#include <functional>

namespace rtq {

// Runs task(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; results must be written to per-index slots so the
// outcome does not depend on scheduling. The first exception thrown by a task
// is rethrown after all workers have joined.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace rtq
