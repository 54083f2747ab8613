#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shom {

namespace detail {
inline std::atomic<unsigned>& thread_override() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

/// Worker count: set_thread_count() if called, else SHOM_THREADS, else hardware concurrency.
inline unsigned thread_count() {
  if (unsigned forced = detail::thread_override().load()) return forced;
  if (const char* env = std::getenv("SHOM_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// 0 restores the default.
inline void set_thread_count(unsigned n) { detail::thread_override().store(n); }

/// Calls body(chunk_index, begin, end) over fixed-size chunks of [0, n).
/// Chunk boundaries depend only on n and chunk, never on the thread count,
/// so per-chunk results merged in chunk order are reproducible.
template <typename Body>
void parallel_chunks(std::size_t n, std::size_t chunk, Body&& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n_chunks));
  auto run = [&](std::size_t c) { body(c, c * chunk, std::min(n, (c + 1) * chunk)); };
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < n_chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Element-wise parallel loop; body(i) must only write state owned by i.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t chunk = 16) {
  parallel_chunks(n, chunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace shom
