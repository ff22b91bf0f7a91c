#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace emg {

/// Raised for any invalid configuration value. Carries the offending key and,
/// when the value came from a file, its location ("path:line").
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string key, const std::string& message, std::string location = {});

  const std::string& key() const noexcept { return key_; }
  const std::string& location() const noexcept { return location_; }

private:
  std::string key_;
  std::string location_;
};

/// Model and protocol parameters of one simulation run.
struct RunConfig {
  int N = 101;                          // agents
  int m = 3;                            // memory length
  double D = -4.0;                      // mutation threshold on the score
  double R = 1.0;                       // loss-sensitivity ratio
  double beta = 0.0;                    // market-impact weight
  double epsilon = 0.125;               // mutation half-width
  std::int64_t relax_steps = 100000;
  std::int64_t measure_steps = 1000;
  std::uint64_t seed = 1;
  double initial_price = 0.0;
  bool random_initial_holdings = false; // each agent starts holding with probability 1/2

  /// Throws ConfigError naming the first field that violates its range.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// The prediction table is a dense array over 2^m histories.
inline constexpr int kMaxMemory = 24;

}  // namespace emg
