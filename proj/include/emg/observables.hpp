#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emg/engine.hpp"

namespace emg {

inline constexpr int kDefaultHistogramBins = 20;

/// Per-state occurrence counts and sums of the price change, accumulated over
/// the measurement window.
class ConditionalStats {
public:
  explicit ConditionalStats(std::uint32_t state_count);

  void add(std::uint32_t state, double price_change);

  std::uint32_t state_count() const noexcept { return static_cast<std::uint32_t>(counts_.size()); }
  std::uint64_t count(std::uint32_t state) const { return counts_.at(state); }
  std::uint64_t total() const noexcept { return total_; }
  double frequency(std::uint32_t state) const;
  /// 0 for states never visited.
  double conditional_mean(std::uint32_t state) const;

private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> sums_;
  std::uint64_t total_ = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// Everything measured at the end of one run. Price-window quantities are
/// absent when the run had no measurement window.
struct ObservableSummary {
  double sigma_g = 0.0;
  double g_mean = 0.0;
  std::vector<double> histogram;
  std::optional<double> sigma_p;
  std::optional<double> H;
  std::optional<double> p_w;
  std::uint64_t n_agents = 0;
  std::uint64_t n_measured_steps = 0;
  std::uint64_t n_trades = 0;
  std::uint64_t n_wins = 0;

  bool has_price_window() const noexcept { return n_measured_steps > 0; }
};

// Population moments in raw form: sqrt(<x^2> - <x>^2). Throw std::domain_error on empty input.
double strategy_sigma(std::span<const double> strategies);
double price_sigma(std::span<const double> price_changes);
double mean_strategy(std::span<const double> strategies);

/// H = sum over states of rho(state) * <dP | state>^2.
double predictability(const ConditionalStats& conditional);

/// Aggregate fraction of winning round trips; 0 when nobody traded.
double winning_probability(std::span<const Agent> agents);
double winning_probability(std::span<const Transaction> transactions);

/// Equal-width bins over [0, 1]; the last bin is closed on the right.
/// Masses sum to 1. Throws std::domain_error when bins < 2 or input is empty.
std::vector<double> strategy_histogram(std::span<const double> strategies, int bins = kDefaultHistogramBins);

/// Ordinary least squares. r_squared is 1 when the residuals vanish, including
/// the flat-y case. Throws std::domain_error when all x are equal.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace emg
