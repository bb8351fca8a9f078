#include "evortex/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace evortex {

int thread_count() {
  if (const char* env = std::getenv("EVORTEX_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn,
                  int threads) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  int n = threads > 0 ? threads : thread_count();
  if (n > count) n = static_cast<int>(count);
  if (n <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  const std::int64_t chunk = (count + n - 1) / n;
  for (int t = 0; t < n; ++t) {
    std::int64_t lo = begin + t * chunk;
    std::int64_t hi = lo + chunk < end ? lo + chunk : end;
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

} // namespace evortex
