#pragma once

#include <Eigen/Core>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace signal_lab {

// Worker count: min(hardware, SIGNAL_LAB_THREADS). The env var caps
// parallelism for the whole process.
inline int default_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("SIGNAL_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < hw) hw = cap;
  }
  return hw;
}

// Runs fn(0), ..., fn(count-1), possibly across threads. Each index must be
// independent work (per-index RNG streams, disjoint output slots), so the
// result does not depend on the schedule. Exceptions are captured and the
// first one rethrown.
inline void parallel_for(Eigen::Index count,
                         const std::function<void(Eigen::Index)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = default_threads();
  if (threads > count) threads = static_cast<int>(count);
  if (threads <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const Eigen::Index i = cursor.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace signal_lab
