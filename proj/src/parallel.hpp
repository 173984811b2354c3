#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace likefarm::detail {

/// Calls fn(item) for every item on up to `threads` workers. Items are
/// claimed in order; the first exception (lowest item position) is
/// rethrown after all workers finish.
template <class T, class Fn>
void run_parallel(const std::vector<T>& items, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || items.size() <= 1) {
    for (const T& item : items) fn(item);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = items.size();
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        fn(items[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(threads, items.size());
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace likefarm::detail
