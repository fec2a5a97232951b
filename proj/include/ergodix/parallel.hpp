#pragma once

// Index-ordered parallel evaluation with fixed-order reduction. Results are
// bit-identical for every thread count: workers only fill slots, and every
// sum runs sequentially over the slots in index order.

#include <complex>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

namespace ergodix {

/// Process-wide worker count used by parallel_map (default 1).
void set_thread_count(unsigned threads);
unsigned thread_count();

template <class F>
auto parallel_map(std::size_t count, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using T = std::invoke_result_t<F&, std::size_t>;
  std::vector<T> out(count);
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        // Contiguous blocks; the partition never affects the values written.
        const std::size_t lo = count * w / workers;
        const std::size_t hi = count * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Neumaier-compensated sum in index order.
double ordered_sum(std::span<const double> values);
std::complex<double> ordered_sum(std::span<const std::complex<double>> values);

}  // namespace ergodix
