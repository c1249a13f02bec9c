#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qcland {

/// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each,
/// using up to n_threads std::threads. Results must be written to
/// per-index slots so the outcome is independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
  if (n == 0) return;
  const std::size_t workers =
      n_threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
  if (workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

inline int hardware_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qcland
