#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace seisal {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over [0, count) split into one contiguous range per
// worker. The partition depends only on (count, threads), never on timing,
// so workers that write disjoint index ranges produce identical results for
// any thread count. Callers must keep fn exception-free.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(resolve_threads(threads)), count ? count : 1);
  if (workers <= 1) {
    fn(static_cast<std::size_t>(0), count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace seisal
