#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sparsekern {

namespace detail {
inline std::atomic<unsigned> configured_threads{0};
inline thread_local bool inside_parallel_region = false;
}  // namespace detail

/// 0 restores the default (SPARSEKERN_THREADS, else hardware concurrency).
inline void set_thread_count(unsigned n) noexcept { detail::configured_threads = n; }

inline unsigned thread_count() noexcept {
  if (unsigned n = detail::configured_threads.load(); n != 0) return n;
  if (const char* env = std::getenv("SPARSEKERN_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for every i in [0, n). Each index is visited exactly once, so
/// callers that write only to slot i get schedule-independent results.
/// Nested calls run serially on the calling worker.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_per_worker = 1) {
  const std::size_t workers =
      detail::inside_parallel_region
          ? 1
          : std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_per_worker)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    detail::inside_parallel_region = true;
    try {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
    detail::inside_parallel_region = false;
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// parallel_for over contiguous chunks [begin, end).
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk, Body&& body) {
  chunk = std::max<std::size_t>(1, chunk);
  const std::size_t count = (n + chunk - 1) / chunk;
  parallel_for(count, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    body(begin, std::min(n, begin + chunk));
  });
}

}  // namespace sparsekern
