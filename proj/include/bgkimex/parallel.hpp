#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace bgkimex {

/// Strided parallel loop over [0, n); fn(worker, i) with worker < threads.
/// Falls through to a plain loop for a single thread. Work items must write
/// disjoint outputs so results do not depend on the thread count.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(0, i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, n, workers] {
      for (int i = w; i < n; i += workers) fn(w, i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace bgkimex
