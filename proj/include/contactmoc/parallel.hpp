#pragma once

#include <cstddef>
#include <functional>

namespace contactmoc {

// Worker count: CONTACTMOC_THREADS when set (>= 1), else hardware concurrency.
unsigned worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
// handled by exactly one call, so writes to per-index slots are race free and
// the result does not depend on the worker count. The exception thrown for the
// lowest chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace contactmoc
