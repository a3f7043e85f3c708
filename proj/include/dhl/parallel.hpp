#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dhl {

/// Caps the worker threads used by data-parallel loops. 0 means
/// hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Calls fn(begin, end) on contiguous chunks of [0, count). Every index is
/// processed exactly once, so results do not depend on the schedule as long
/// as fn only writes to its own indices.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_chunk = 256) {
  const std::size_t workers =
      std::min<std::size_t>(max_threads(), (count + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dhl
