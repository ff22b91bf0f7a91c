#pragma once

namespace emg::theory {

struct TheoryParams {
  int N = 101;
  double R = 1.0;
  double D = -4.0;
  double aN = 0.0;     // population-dependent scale a(N); no closed form exists, so it is a free input
  double beta = 0.0;

  void validate() const;
};

/// Winning probability of strategy g in the plain evolutionary minority game.
double tau(double g, int N);

/// Unnormalized strategy density 1 / (1/2 - tau) = sqrt(N) / (g(1-g)).
/// Throws std::domain_error at the singular endpoints g = 0 and g = 1.
double emg_density(double g, int N);

/// Integral of emg_density over [delta, 1 - delta] by composite Simpson.
double emg_density_normalizer(int N, double delta = 1e-3);

/// Per-agent profit of an all-buy then all-sell round trip at full excess
/// demand: sqrt(N) * (1 - 2 beta).
double majority_roundtrip_profit(int N, double beta);

/// Lower edge of the surviving band above 1/2: (aN*D + R) / (1 + R).
double critical_strategy_high(const TheoryParams& p);

/// Upper edge of the surviving band below 1/2: (1 - aN*D) / (1 + R).
double critical_strategy_low(const TheoryParams& p);

}  // namespace emg::theory
