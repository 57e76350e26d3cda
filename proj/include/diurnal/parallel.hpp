/**
 * @file parallel.hpp
 * @brief Static-partition parallel loop. Results must be written to per-index slots so
 *        output never depends on the thread count.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace diurnal {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any worker (lowest index wins) is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  std::size_t first_index = count;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < first_index) {
            first_index = i;
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

}  // namespace diurnal
