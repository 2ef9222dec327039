#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace rtmvdr {

/// Runs fn(i) for i in [0, count) across `workers` threads. Work is assigned
/// by index stride, and callers write results into index-addressed slots, so
/// output is independent of the worker count and of scheduling.
inline void parallel_for(int count, int workers,
                         const std::function<void(int)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rtmvdr
