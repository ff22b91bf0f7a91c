#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emg/engine.hpp"
#include "emg/observables.hpp"

namespace emg {

/// One row of a dumped price trajectory. `price` is P(t+1), the price after
/// step t has been applied.
struct TrajectoryRow {
  std::int64_t t = 0;
  double price = 0.0;
  int excess_demand = 0;
  double p_tr = 0.0;
};

// Relaxation steps kept in a trajectory dump ahead of the measurement window.
inline constexpr std::int64_t kTrajectoryRelaxTail = 1000;

struct RunResult {
  std::uint64_t seed = 0;
  double beta = 0.0;
  double R = 1.0;
  std::size_t beta_index = 0;
  std::size_t r_index = 0;
  std::size_t replicate = 0;
  ObservableSummary summary;
  std::vector<TrajectoryRow> trajectory;
};

/// Relaxes for relax_steps, then measures for measure_steps. Trade counters
/// are reset when measurement starts, so P_W only covers the window.
template <UniformSource S>
RunResult run_measured(Simulation& sim, S& source, bool dump_trajectory) {
  const RunConfig& cfg = sim.config();
  const std::int64_t total = cfg.relax_steps + cfg.measure_steps;
  const std::int64_t dump_from = dump_trajectory ? std::max<std::int64_t>(0, cfg.relax_steps - kTrajectoryRelaxTail) : total;

  RunResult result;
  result.seed = cfg.seed;
  result.beta = cfg.beta;
  result.R = cfg.R;

  ConditionalStats conditional(sim.market().state_count());
  std::vector<double> changes;
  changes.reserve(static_cast<std::size_t>(cfg.measure_steps));
  if (dump_trajectory) result.trajectory.reserve(static_cast<std::size_t>(total - dump_from));

  for (std::int64_t t = 0; t < total; ++t) {
    if (t == cfg.relax_steps) sim.reset_trade_counters();
    const StepRecord& rec = sim.step(source);
    if (t >= cfg.relax_steps) {
      changes.push_back(rec.price_change());
      conditional.add(rec.state, rec.price_change());
    }
    if (t >= dump_from) result.trajectory.push_back({rec.t, rec.price_after, rec.excess_demand, rec.p_tr});
  }

  ObservableSummary& s = result.summary;
  const std::vector<double> g = sim.strategies();
  s.n_agents = g.size();
  s.sigma_g = strategy_sigma(g);
  s.g_mean = mean_strategy(g);
  s.histogram = strategy_histogram(g);
  s.n_measured_steps = changes.size();
  if (!changes.empty()) {
    s.sigma_p = price_sigma(changes);
    s.H = predictability(conditional);
    s.p_w = winning_probability(sim.agents());
    for (const Agent& a : sim.agents()) {
      s.n_trades += a.trades;
      s.n_wins += a.wins;
    }
  }
  return result;
}

/// Seeded run from config.seed.
RunResult run_single(const RunConfig& config, bool dump_trajectory = false);

struct SweepSpec {
  RunConfig base;
  std::vector<double> beta_values{0.0};
  std::vector<double> r_values{1.0};
  int runs_per_point = 100;
  std::uint64_t base_seed = 1;

  void validate() const;
  std::size_t point_count() const noexcept { return beta_values.size() * r_values.size(); }
  std::size_t total_runs() const noexcept { return point_count() * static_cast<std::size_t>(std::max(runs_per_point, 0)); }
};

// Index widths packed into the seed-derivation counter.
inline constexpr std::size_t kMaxGridAxis = std::size_t{1} << 16;
inline constexpr std::size_t kMaxReplicates = std::size_t{1} << 32;

/// Per-run seed. The grid indices are packed into a 64-bit counter that is
/// xor-ed with the mixed base seed and mixed again; both mixes are bijective,
/// so distinct (beta, R, replicate) indices never share a seed, and a run's
/// seed never depends on the size of the grid.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t beta_index, std::size_t r_index, std::size_t replicate);

struct RunTask {
  std::size_t beta_index = 0;
  std::size_t r_index = 0;
  std::size_t replicate = 0;
  RunConfig config;
};

/// Grid order: beta outermost, then R, then replicate.
std::vector<RunTask> expand_tasks(const SweepSpec& spec);

struct SweepOptions {
  int threads = 0;  // 0: OpenMP default
  bool dump_trajectories = false;
};

RunResult run_task(const RunTask& task, bool dump_trajectory);

/// OpenMP kernel: one run per task, results stored by task index.
std::vector<RunResult> run_tasks_parallel(std::span<const RunTask> tasks, const SweepOptions& options);
/// Serial reference for the kernel above.
std::vector<RunResult> run_tasks_serial(std::span<const RunTask> tasks, const SweepOptions& options);

struct Aggregate {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
  std::size_t n = 0;
};

Aggregate aggregate(std::span<const double> values);

struct ObservableAggregates {
  std::size_t n_runs = 0;
  Aggregate sigma_g;
  Aggregate sigma_p;
  Aggregate H;
  Aggregate p_w;
  Aggregate g_mean;
};

ObservableAggregates aggregate_runs(std::span<const RunResult> runs);

struct RegimeSplit {
  std::vector<std::size_t> low;   // g_mean < 0.5
  std::vector<std::size_t> high;  // g_mean >= 0.5
};

/// Partitions run indices by final mean strategy.
RegimeSplit regime_split(std::span<const RunResult> runs);

struct PointResult {
  double beta = 0.0;
  double R = 1.0;
  std::size_t beta_index = 0;
  std::size_t r_index = 0;
  ObservableAggregates all;
  ObservableAggregates low;
  ObservableAggregates high;
  std::vector<double> histogram;  // mean of the per-run histograms
  std::vector<RunResult> runs;    // replicate order
};

/// Groups runs (in task order, as returned by the kernels) into grid points.
std::vector<PointResult> assemble_points(const SweepSpec& spec, std::vector<RunResult> runs);

std::vector<PointResult> sweep(const SweepSpec& spec, const SweepOptions& options = {});
std::vector<PointResult> sweep_serial(const SweepSpec& spec, const SweepOptions& options = {});

struct RegimeFits {
  std::size_t n_low = 0;
  std::size_t n_high = 0;
  std::optional<LinearFit> low;   // absent when fewer than two distinct g_mean values
  std::optional<LinearFit> high;
};

/// OLS of sigma_p against g_mean over every run of every point, per regime.
RegimeFits fit_regimes(std::span<const PointResult> points);

enum class FigureKind { histogram, sigma_g, trajectories, sigma_p, scatter_fit, predictability, winning };

struct FigurePreset {
  std::string name;
  std::string title;
  FigureKind kind = FigureKind::sigma_g;
  SweepSpec spec;
  bool dump_trajectories = false;
};

class UnknownFigureError : public std::invalid_argument {
public:
  explicit UnknownFigureError(const std::string& name);
};

const std::vector<std::string>& figure_names();
FigurePreset figure_preset(std::string_view name);

}  // namespace emg
