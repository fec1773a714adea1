#pragma once

#include <cstddef>
#include <functional>

namespace ucompare {

/// Runs body(task, worker) for every task in [0, tasks) on up to `threads`
/// workers. Tasks are handed out dynamically, so callers must make each task's
/// result independent of which worker ran it. The first exception thrown by a
/// task is rethrown after all workers have stopped.
void parallel_for(std::size_t tasks, std::size_t threads,
                  const std::function<void(std::size_t task, std::size_t worker)>& body);

/// Number of workers actually used for `tasks` tasks given a requested count
/// (0 means hardware concurrency).
std::size_t effective_threads(std::size_t requested, std::size_t tasks) noexcept;

}  // namespace ucompare
