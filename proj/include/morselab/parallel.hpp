#pragma once

#include <cstddef>
#include <functional>

namespace morselab {

/// Worker count: MORSELAB_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n). Iterations are independent; callers write
/// results by index so the outcome does not depend on scheduling. The first
/// exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace morselab
