#pragma once

#include <cstddef>
#include <functional>

namespace ovq {

// Global worker count for row-parallel loops. Initialized from OVQ_THREADS
// (falling back to hardware_concurrency) on first use.
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
// so workers may write disjoint output rows without synchronization. Results
// are identical regardless of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace ovq
