#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace melodikit {

// Run fn(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own output slot and draws from its own random substream, so
// results are identical for any thread count; reductions happen afterwards
// in index order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn) {
  threads = std::max(1, threads);
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

} // namespace melodikit
