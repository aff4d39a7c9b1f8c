#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "gomk/types.hpp"

namespace gomk {

/// Runs fn(begin, end, worker) over [0, count) split into `threads` contiguous chunks.
///
/// Chunk boundaries depend only on (count, threads), so per-worker partial
/// results reduced in worker order are reproducible for a fixed thread count.
template <typename Fn>
void parallel_for(Index count, int threads, Fn&& fn) {
  const int workers = static_cast<int>(std::max<Index>(1, std::min<Index>(threads, count)));
  if (workers <= 1) {
    fn(Index(0), count, 0);
    return;
  }
  const Index chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const Index begin = std::min(count, w * chunk);
    const Index end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
}

/// Number of workers parallel_for will use.
inline int worker_count(Index count, int threads) {
  return static_cast<int>(std::max<Index>(1, std::min<Index>(threads, count)));
}

}  // namespace gomk
