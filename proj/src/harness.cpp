#include "emg/harness.hpp"

#include <cmath>
#include <utility>

namespace emg {

RunResult run_single(const RunConfig& config, bool dump_trajectory) {
  Run run = init_run(config);
  return run_measured(run.sim, run.rng, dump_trajectory);
}

void SweepSpec::validate() const {
  base.validate();
  if (beta_values.empty()) throw ConfigError("beta_values", "must not be empty");
  if (r_values.empty()) throw ConfigError("r_values", "must not be empty");
  if (beta_values.size() > kMaxGridAxis) throw ConfigError("beta_values", "too many values");
  if (r_values.size() > kMaxGridAxis) throw ConfigError("r_values", "too many values");
  for (double b : beta_values) {
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("beta_values", "every value must be in [0, 1]");
  }
  for (double r : r_values) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("r_values", "every value must be finite and >= 1");
  }
  if (runs_per_point < 1) throw ConfigError("runs_per_point", "must be >= 1");
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t beta_index, std::size_t r_index, std::size_t replicate) {
  if (beta_index >= kMaxGridAxis || r_index >= kMaxGridAxis || replicate >= kMaxReplicates) {
    throw std::out_of_range("derive_seed: grid index exceeds the packed counter width");
  }
  const std::uint64_t counter = (static_cast<std::uint64_t>(beta_index) << 48) |
                                (static_cast<std::uint64_t>(r_index) << 32) | static_cast<std::uint64_t>(replicate);
  return mix64(mix64(base_seed) ^ counter);
}

std::vector<RunTask> expand_tasks(const SweepSpec& spec) {
  spec.validate();
  std::vector<RunTask> tasks;
  tasks.reserve(spec.total_runs());
  for (std::size_t bi = 0; bi < spec.beta_values.size(); ++bi) {
    for (std::size_t ri = 0; ri < spec.r_values.size(); ++ri) {
      for (std::size_t rep = 0; rep < static_cast<std::size_t>(spec.runs_per_point); ++rep) {
        RunTask task;
        task.beta_index = bi;
        task.r_index = ri;
        task.replicate = rep;
        task.config = spec.base;
        task.config.beta = spec.beta_values[bi];
        task.config.R = spec.r_values[ri];
        task.config.seed = derive_seed(spec.base_seed, bi, ri, rep);
        tasks.push_back(std::move(task));
      }
    }
  }
  return tasks;
}

RunResult run_task(const RunTask& task, bool dump_trajectory) {
  RunResult result = run_single(task.config, dump_trajectory);
  result.beta_index = task.beta_index;
  result.r_index = task.r_index;
  result.replicate = task.replicate;
  return result;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate agg;
  agg.n = values.size();
  if (values.empty()) return agg;
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(agg.n);
  if (agg.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.se = std::sqrt(ss / static_cast<double>(agg.n - 1)) / std::sqrt(static_cast<double>(agg.n));
  }
  return agg;
}

namespace {

template <class Get>
Aggregate aggregate_field(std::span<const RunResult> runs, Get get) {
  std::vector<double> values;
  values.reserve(runs.size());
  for (const RunResult& r : runs) {
    const std::optional<double> v = get(r.summary);
    if (v) values.push_back(*v);
  }
  return aggregate(values);
}

std::vector<RunResult> pick(std::span<const RunResult> runs, const std::vector<std::size_t>& indices) {
  std::vector<RunResult> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    RunResult r = runs[i];
    r.trajectory.clear();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

ObservableAggregates aggregate_runs(std::span<const RunResult> runs) {
  ObservableAggregates out;
  out.n_runs = runs.size();
  out.sigma_g = aggregate_field(runs, [](const ObservableSummary& s) { return std::optional<double>(s.sigma_g); });
  out.sigma_p = aggregate_field(runs, [](const ObservableSummary& s) { return s.sigma_p; });
  out.H = aggregate_field(runs, [](const ObservableSummary& s) { return s.H; });
  out.p_w = aggregate_field(runs, [](const ObservableSummary& s) { return s.p_w; });
  out.g_mean = aggregate_field(runs, [](const ObservableSummary& s) { return std::optional<double>(s.g_mean); });
  return out;
}

RegimeSplit regime_split(std::span<const RunResult> runs) {
  RegimeSplit split;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    (runs[i].summary.g_mean < 0.5 ? split.low : split.high).push_back(i);
  }
  return split;
}

std::vector<PointResult> assemble_points(const SweepSpec& spec, std::vector<RunResult> runs) {
  if (runs.size() != spec.total_runs()) throw std::invalid_argument("assemble_points: run count does not match the grid");
  std::vector<PointResult> points;
  points.reserve(spec.point_count());
  const auto per_point = static_cast<std::size_t>(spec.runs_per_point);
  auto next = runs.begin();
  for (std::size_t bi = 0; bi < spec.beta_values.size(); ++bi) {
    for (std::size_t ri = 0; ri < spec.r_values.size(); ++ri) {
      PointResult p;
      p.beta = spec.beta_values[bi];
      p.R = spec.r_values[ri];
      p.beta_index = bi;
      p.r_index = ri;
      p.runs.assign(std::make_move_iterator(next), std::make_move_iterator(next + static_cast<std::ptrdiff_t>(per_point)));
      next += static_cast<std::ptrdiff_t>(per_point);
      std::sort(p.runs.begin(), p.runs.end(),
                [](const RunResult& a, const RunResult& b) { return a.replicate < b.replicate; });

      p.all = aggregate_runs(p.runs);
      const RegimeSplit split = regime_split(p.runs);
      p.low = aggregate_runs(pick(p.runs, split.low));
      p.high = aggregate_runs(pick(p.runs, split.high));

      p.histogram.assign(p.runs.front().summary.histogram.size(), 0.0);
      for (const RunResult& r : p.runs) {
        for (std::size_t k = 0; k < p.histogram.size(); ++k) p.histogram[k] += r.summary.histogram[k];
      }
      for (double& m : p.histogram) m /= static_cast<double>(p.runs.size());
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::vector<PointResult> sweep(const SweepSpec& spec, const SweepOptions& options) {
  const std::vector<RunTask> tasks = expand_tasks(spec);
  return assemble_points(spec, run_tasks_parallel(tasks, options));
}

std::vector<PointResult> sweep_serial(const SweepSpec& spec, const SweepOptions& options) {
  const std::vector<RunTask> tasks = expand_tasks(spec);
  return assemble_points(spec, run_tasks_serial(tasks, options));
}

RegimeFits fit_regimes(std::span<const PointResult> points) {
  std::vector<double> low_x, low_y, high_x, high_y;
  for (const PointResult& p : points) {
    for (const RunResult& r : p.runs) {
      if (!r.summary.sigma_p) continue;
      if (r.summary.g_mean < 0.5) {
        low_x.push_back(r.summary.g_mean);
        low_y.push_back(*r.summary.sigma_p);
      } else {
        high_x.push_back(r.summary.g_mean);
        high_y.push_back(*r.summary.sigma_p);
      }
    }
  }
  auto try_fit = [](const std::vector<double>& x, const std::vector<double>& y) -> std::optional<LinearFit> {
    if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return std::nullopt;
    return linear_fit(x, y);
  };
  RegimeFits fits;
  fits.n_low = low_x.size();
  fits.n_high = high_x.size();
  fits.low = try_fit(low_x, low_y);
  fits.high = try_fit(high_x, high_y);
  return fits;
}

}  // namespace emg
