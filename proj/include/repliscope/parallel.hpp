#pragma once

#include <cstddef>
#include <functional>

namespace repliscope {

/// Resolves a user-facing thread count (0 = hardware concurrency) to >= 1.
std::size_t resolve_threads(std::size_t requested);

/// Runs task(i) for i in [0, n_tasks) on up to `threads` workers.
/// Tasks must write to disjoint outputs; the first exception thrown by any
/// task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n_tasks, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace repliscope
