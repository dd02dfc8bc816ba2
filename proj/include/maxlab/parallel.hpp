#pragma once

#include <cstddef>
#include <functional>

namespace maxlab {

// Worker count: MAXLAB_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] std::size_t worker_count();

// Calls body(i) for i in [0, n) across the worker pool. body must only write
// to state owned by index i. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace maxlab
