#ifndef SPHEREFORGE_PARALLEL_HPP
#define SPHEREFORGE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sphereforge {

/// Worker count: SPHEREFORGE_THREADS if set and positive, else hardware concurrency.
inline int worker_count()
{
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SPHEREFORGE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return hw;
}

/// Calls body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written to slot i are independent of the schedule.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, int workers = 0)
{
  if (workers <= 0) workers = worker_count();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    constexpr std::size_t chunk = 16;
    for (;;) {
      std::size_t start = next.fetch_add(chunk);
      if (start >= n) return;
      std::size_t stop = std::min(n, start + chunk);
      try {
        for (std::size_t i = start; i < stop; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_PARALLEL_HPP
