#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace glasslocal {

/// Thread count from GLASSLOCAL_THREADS, else 1.
inline int env_threads() {
  if (const char* s = std::getenv("GLASSLOCAL_THREADS")) {
    try {
      const int v = std::stoi(s);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers with static
/// chunking. Each index must write only its own output slot, which makes the
/// result independent of the thread count. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / workers, end = count * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace glasslocal
