#pragma once

#include <cstddef>
#include <functional>

namespace mmot {

/// Worker thread count: hardware concurrency, capped by the MMOT_THREADS
/// environment variable when set.
int max_threads();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Every index must be
/// processed independently of the others; since each index is computed the
/// same way regardless of the chunking, results do not depend on the thread
/// count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace mmot
