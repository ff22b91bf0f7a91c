#include "emg/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "emg/config.hpp"

namespace emg::theory {

void TheoryParams::validate() const {
  if (N < 1) throw ConfigError("N", "must be >= 1");
  if (!(R >= 1.0)) throw ConfigError("R", "must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta", "must be in [0, 1]");
}

double tau(double g, int N) { return 0.5 - g * (1.0 - g) / std::sqrt(static_cast<double>(N)); }

double emg_density(double g, int N) {
  if (!(g > 0.0 && g < 1.0)) throw std::domain_error("emg_density: singular outside the open interval (0, 1)");
  return std::sqrt(static_cast<double>(N)) / (g * (1.0 - g));
}

double emg_density_normalizer(int N, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::domain_error("emg_density_normalizer: delta must be in (0, 0.5)");
  constexpr int kPanels = 200000;  // even
  const double a = delta;
  const double b = 1.0 - delta;
  const double h = (b - a) / kPanels;
  double sum = emg_density(a, N) + emg_density(b, N);
  for (int k = 1; k < kPanels; ++k) {
    sum += (k % 2 == 1 ? 4.0 : 2.0) * emg_density(a + k * h, N);
  }
  return sum * h / 3.0;
}

double majority_roundtrip_profit(int N, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("majority_roundtrip_profit: beta must be in [0, 1]");
  return std::sqrt(static_cast<double>(N)) * (1.0 - 2.0 * beta);
}

double critical_strategy_high(const TheoryParams& p) { return (p.aN * p.D + p.R) / (1.0 + p.R); }

double critical_strategy_low(const TheoryParams& p) { return (1.0 - p.aN * p.D) / (1.0 + p.R); }

}  // namespace emg::theory
