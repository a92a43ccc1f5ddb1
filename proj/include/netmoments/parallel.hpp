#pragma once

#include <cstddef>
#include <functional>

namespace netmoments {

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
/// Tasks are pulled from a shared counter; callers must make each task
/// independent (own RNG stream, own output slot) so the result does not
/// depend on scheduling. workers <= 1 runs inline.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

/// Resolves a worker count: explicit value if > 0, else NETMOMENTS_WORKERS,
/// else 1.
int resolve_workers(int requested);

}  // namespace netmoments
