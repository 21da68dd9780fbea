#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pleg {

/// Worker count: PLEG_THREADS if set and positive, else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("PLEG_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Each index is visited exactly once, so
/// bodies that write to slot i only give results independent of scheduling.
/// The first exception thrown by any body is rethrown on the caller.
template <typename Body>
void parallel_for(long count, Body&& body) {
  const long workers = std::min<long>(thread_budget(), count);
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long i = w; i < count; i += workers) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pleg
