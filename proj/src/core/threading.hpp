#pragma once

#include <cstddef>
#include <functional>

namespace scn {

/// Global worker count. 0 selects the hardware concurrency; 1 runs inline.
void set_thread_count(int n);
int thread_count();

/// Splits [0, n) into at most thread_count() contiguous chunks and runs
/// `fn(begin, end, chunk_index)` on each. Chunk boundaries depend only on n
/// and the thread count, so chunk-ordered reductions are reproducible for a
/// fixed thread count.
void parallel_chunks(size_t n,
                     const std::function<void(size_t, size_t, int)>& fn);

/// Convenience element-wise variant.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace scn
