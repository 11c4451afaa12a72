#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace cohsim {

/// Effective worker count: 0 means one per hardware thread.
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls body(i) for i in [0, n). Indices are split into contiguous blocks,
/// one per worker. The first exception (lowest block) is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  const std::size_t w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t b = 0; b < w; ++b) {
    const std::size_t lo = n * b / w;
    const std::size_t hi = n * (b + 1) / w;
    pool.emplace_back([&, lo, hi, b] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Pairwise (tree) sum in index order. The result depends only on the values,
/// never on how they were produced.
template <typename T>
T pairwise_sum(std::span<const T> x) {
  if (x.empty()) return T(0);
  if (x.size() <= 8) {
    T s = x[0];
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& x) {
  return pairwise_sum(std::span<const T>(x));
}

}  // namespace cohsim
