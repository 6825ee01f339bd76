// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace divfree {

/// Parallel map over [0, n): fn(i) must write only to slot i of preallocated
/// storage, so results are identical for any thread count. The first exception
/// thrown by any fn is rethrown on the calling thread. max_threads = 0 uses
/// the hardware count.
template <class F>
void parallel_for(std::size_t n, F&& fn, unsigned max_threads = 0) {
  if (n == 0) return;
  unsigned hw = max_threads != 0 ? max_threads : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t lo = n * t / nt;
    const std::size_t hi = n * (t + 1) / nt;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace divfree
