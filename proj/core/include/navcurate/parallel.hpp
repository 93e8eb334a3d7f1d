#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace navcurate {

/// Worker count from NAVCURATE_WORKERS, falling back to the processor count.
unsigned default_workers();

/// Calls fn(i) for every i in [0, n) on up to `workers` threads. Items are split
/// into contiguous blocks, so callers writing to slot i of a pre-sized output get
/// results independent of the worker count. If any call throws, the exception
/// from the lowest failing index is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> failed_at(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = w * block;
      const std::size_t end = std::min(n, begin + block);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  std::size_t first = threads;
  for (std::size_t w = 0; w < threads; ++w) {
    if (errors[w] && (first == threads || failed_at[w] < failed_at[first])) first = w;
  }
  if (first != threads) std::rethrow_exception(errors[first]);
}

}  // namespace navcurate
