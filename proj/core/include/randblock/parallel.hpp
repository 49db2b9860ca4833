#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace randblock {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work items are independent; callers store results by index and reduce
/// them afterwards in index order, so the thread count never changes the
/// numbers. The first exception thrown by any item is rethrown.
template <class Fn>
void parallel_for_index(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Maps fn over [0, count) and returns the results in index order.
template <class Fn>
auto parallel_map(std::size_t count, int threads, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  parallel_for_index(count, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace randblock
