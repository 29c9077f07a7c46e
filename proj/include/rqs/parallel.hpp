#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rqs {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

//! Runs body(i) for i in [0, n). Work items must be independent; results
//! should be written to per-index slots so the outcome does not depend on
//! scheduling.
inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> cursor{0};
  std::vector<std::thread> pool;
  const size_t workers = std::min<size_t>(threads, n);
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = cursor.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rqs
