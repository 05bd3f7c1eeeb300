#ifndef SUBSUM_PARALLEL_HPP
#define SUBSUM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace subsum {

/// SUBSUM_WORKERS, falling back to the hardware concurrency (at least 1).
inline std::size_t worker_count_from_env() {
  if (const char* raw = std::getenv("SUBSUM_WORKERS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(raw, &end, 10);
    // strtoul would wrap "-2" to a huge count; treat any sign as invalid
    if (raw[0] != '-' && raw[0] != '+' && end != raw && *end == '\0' && parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Run fn(i) for every i in [0, count) on a worker pool. Work items are
/// claimed from a shared counter; callers keep determinism by writing results
/// into slot i, so output can be emitted in input order afterwards. The first
/// exception thrown by any worker is rethrown here.
template <class Fn>
void parallel_for_index(std::size_t count, std::size_t workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace subsum

#endif
