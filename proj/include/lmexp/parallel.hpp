#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lmexp {

/// Worker count for parallel loops: the LMEXP_WORKERS environment variable
/// when set to a positive integer, otherwise the hardware thread count.
inline int worker_count() {
  if (const char* env = std::getenv("LMEXP_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [0, total) into one contiguous chunk per worker and runs
/// fn(begin, end, worker_index) on each. Runs inline when a single worker
/// suffices; rethrows the first exception raised by any worker.
template <typename Fn>
void for_each_chunk(std::int64_t total, Fn&& fn) {
  if (total <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(worker_count(), total));
  if (workers <= 1) {
    fn(std::int64_t{0}, total, 0);
    return;
  }
  const std::int64_t step = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * step;
    const std::int64_t hi = std::min(total, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        fn(lo, hi, w);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lmexp
