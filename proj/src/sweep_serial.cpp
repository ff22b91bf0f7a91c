#include "emg/harness.hpp"

namespace emg {

std::vector<RunResult> run_tasks_serial(std::span<const RunTask> tasks, const SweepOptions& options) {
  std::vector<RunResult> results;
  results.reserve(tasks.size());
  for (const RunTask& task : tasks) results.push_back(run_task(task, options.dump_trajectories));
  return results;
}

}  // namespace emg
