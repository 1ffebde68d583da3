#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace otto {

// Runs fn(i) for i in [0, n) on up to `parallelism` threads. Each index is
// claimed exactly once; callers write results into per-index slots.
template <class Fn>
void parallel_for(std::size_t n, int parallelism, Fn&& fn) {
  const std::size_t cap = std::max<std::size_t>(n, 1);
  const std::size_t workers = std::min<std::size_t>(parallelism < 1 ? 1 : static_cast<std::size_t>(parallelism), cap);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

}  // namespace otto
