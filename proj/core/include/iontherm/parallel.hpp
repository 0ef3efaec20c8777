#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace iontherm {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// handed out dynamically; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (cascade) summation; the result depends only on the order of the input.
template <class It>
double pairwise_sum(It first, It last) {
  const auto n = std::distance(first, last);
  if (n <= 8) {
    double s = 0.0;
    for (; first != last; ++first) s += *first;
    return s;
  }
  const It mid = std::next(first, n / 2);
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

}  // namespace iontherm
