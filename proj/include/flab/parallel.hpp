#pragma once

#include <cstddef>
#include <functional>

namespace flab {

// Worker count: FLAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to slots it owns.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace flab
