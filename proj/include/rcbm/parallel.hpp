#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace rcbm {

inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Static block partition of [0, n) over workers.  Each worker owns one
// accumulator; the caller merges them in worker order, so the reduction is
// independent of scheduling.  fn(accumulator, index).
template <typename Acc, typename Fn>
std::vector<Acc> parallel_replicates(std::size_t n, unsigned threads,
                                     Fn&& fn) {
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, n == 0 ? 1 : static_cast<unsigned>(n)));
  std::vector<Acc> accs(workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(accs[0], i);
    return accs;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(accs[w], i);
    });
  }
  for (auto& t : pool) t.join();
  return accs;
}

} // namespace rcbm
