#include "emg/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emg {

namespace {

double raw_moment_sigma(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw std::domain_error(std::string(what) + ": empty input");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : xs) {
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
}

}  // namespace

ConditionalStats::ConditionalStats(std::uint32_t state_count) : counts_(state_count, 0), sums_(state_count, 0.0) {
  if (state_count == 0) throw std::invalid_argument("ConditionalStats: need at least one state");
}

void ConditionalStats::add(std::uint32_t state, double price_change) {
  ++counts_.at(state);
  sums_[state] += price_change;
  ++total_;
}

double ConditionalStats::frequency(std::uint32_t state) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_.at(state)) / static_cast<double>(total_);
}

double ConditionalStats::conditional_mean(std::uint32_t state) const {
  const std::uint64_t c = counts_.at(state);
  return c == 0 ? 0.0 : sums_[state] / static_cast<double>(c);
}

double strategy_sigma(std::span<const double> strategies) { return raw_moment_sigma(strategies, "strategy_sigma"); }

double price_sigma(std::span<const double> price_changes) { return raw_moment_sigma(price_changes, "price_sigma"); }

double mean_strategy(std::span<const double> strategies) {
  if (strategies.empty()) throw std::domain_error("mean_strategy: empty input");
  double sum = 0.0;
  for (double g : strategies) sum += g;
  return sum / static_cast<double>(strategies.size());
}

double predictability(const ConditionalStats& conditional) {
  double h = 0.0;
  for (std::uint32_t s = 0; s < conditional.state_count(); ++s) {
    if (conditional.count(s) == 0) continue;
    const double mean = conditional.conditional_mean(s);
    h += conditional.frequency(s) * mean * mean;
  }
  return h;
}

double winning_probability(std::span<const Agent> agents) {
  std::uint64_t wins = 0;
  std::uint64_t trades = 0;
  for (const Agent& a : agents) {
    wins += a.wins;
    trades += a.trades;
  }
  return trades == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(trades);
}

double winning_probability(std::span<const Transaction> transactions) {
  if (transactions.empty()) return 0.0;
  const auto wins = std::count_if(transactions.begin(), transactions.end(),
                                  [](const Transaction& tx) { return tx.profit >= 0.0; });
  return static_cast<double>(wins) / static_cast<double>(transactions.size());
}

std::vector<double> strategy_histogram(std::span<const double> strategies, int bins) {
  if (bins < 2) throw std::domain_error("strategy_histogram: bins must be >= 2");
  if (strategies.empty()) throw std::domain_error("strategy_histogram: empty input");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  for (double g : strategies) {
    auto k = static_cast<long>(std::floor(g * bins));
    k = std::clamp(k, 0L, static_cast<long>(bins) - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  std::vector<double> mass(counts.size());
  const double n = static_cast<double>(strategies.size());
  std::transform(counts.begin(), counts.end(), mass.begin(), [n](std::uint64_t c) { return static_cast<double>(c) / n; });
  return mass;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit: xs and ys differ in length");
  if (xs.size() < 2) throw std::domain_error("linear_fit: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::domain_error("linear_fit: all x values are equal");

  LinearFit fit;
  fit.n_points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

}  // namespace emg
