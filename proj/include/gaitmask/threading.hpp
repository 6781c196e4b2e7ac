#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace gaitmask {

// Runs fn(0..n-1) on up to `threads` workers. Tasks own their output slots by
// index, so the result is identical regardless of thread count. The first
// exception (lowest task index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for_indexed(std::size_t n, int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::pair<std::size_t, std::exception_ptr>> errors;
  std::mutex err_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.emplace_back(i, std::current_exception());
      }
    }
  };
  std::vector<std::thread> pool;
  std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!errors.empty()) {
    std::size_t first = 0;
    for (std::size_t e = 1; e < errors.size(); ++e)
      if (errors[e].first < errors[first].first) first = e;
    std::rethrow_exception(errors[first].second);
  }
}

}  // namespace gaitmask
