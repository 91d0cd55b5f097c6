#pragma once

// Minimal fork-join helper. Work is split into contiguous chunks so callers
// can merge per-chunk results in chunk order, keeping reductions independent
// of scheduling.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mechproof {

/// Worker-pool size: explicit request, else MECHPROOF_THREADS, else hardware.
inline int resolve_thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MECHPROOF_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(chunk_index, begin, end) over [0, total) split into `chunks`
/// contiguous ranges. fn must only touch chunk-local state. The first
/// exception thrown by any chunk is rethrown on the calling thread.
template <class Fn>
void parallel_chunks(long total, int threads, Fn&& fn) {
  if (total <= 0) return;
  threads = std::max(1, threads);
  const long chunk_count = std::min<long>(total, threads);
  const long chunk_size = (total + chunk_count - 1) / chunk_count;
  if (chunk_count == 1) {
    fn(0, 0L, total);
    return;
  }
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunk_count));
  for (long c = 0; c < chunk_count; ++c) {
    const long begin = c * chunk_size;
    const long end = std::min(total, begin + chunk_size);
    if (begin >= end) break;
    pool.emplace_back([&fn, &error_mutex, &error, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mechproof
