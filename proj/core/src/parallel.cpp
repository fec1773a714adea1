#include "ucompare/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ucompare {

std::size_t effective_threads(std::size_t requested, std::size_t tasks) noexcept {
  std::size_t threads = requested;
  if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(threads, tasks));
}

void parallel_for(std::size_t tasks, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (tasks == 0) return;
  const std::size_t workers = effective_threads(threads, tasks);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t, 0);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&](std::size_t worker) {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= tasks) return;
      try {
        body(t, worker);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();  // joins
  if (error) std::rethrow_exception(error);
}

}  // namespace ucompare
