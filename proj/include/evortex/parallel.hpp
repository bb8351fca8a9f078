// parallel.hpp - minimal thread-pool-free parallel_for over index ranges
#ifndef EVORTEX_PARALLEL_HPP
#define EVORTEX_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace evortex {

/// Worker count: EVORTEX_THREADS env var if set, else hardware concurrency.
int thread_count();

/// Runs fn(begin, end) over disjoint contiguous chunks of [begin, end),
/// one chunk per worker. Chunk boundaries depend only on the range and the
/// worker count, so writes to per-index slots are deterministic.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn,
                  int threads = 0);

} // namespace evortex

#endif
