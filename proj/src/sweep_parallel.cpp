#include <exception>

#include <omp.h>

#include "emg/harness.hpp"

namespace emg {

std::vector<RunResult> run_tasks_parallel(std::span<const RunTask> tasks, const SweepOptions& options) {
  std::vector<RunResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(tasks.size());

  // Each run owns its state and stream; results land at their task index, so
  // the output does not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = run_task(tasks[static_cast<std::size_t>(i)], options.dump_trajectories);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace emg
