#include "emg/config.hpp"

#include <cmath>

namespace emg {

namespace {

std::string compose(const std::string& key, const std::string& message, const std::string& location) {
  std::string out;
  if (!location.empty()) out += location + ": ";
  out += "'" + key + "': " + message;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message, std::string location)
    : std::invalid_argument(compose(key, message, location)), key_(std::move(key)), location_(std::move(location)) {}

void RunConfig::validate() const {
  if (N < 1) throw ConfigError("N", "must be >= 1");
  if (m < 1 || m > kMaxMemory) throw ConfigError("m", "must be in [1, " + std::to_string(kMaxMemory) + "]");
  if (!(D < 0.0) || !std::isfinite(D)) throw ConfigError("D", "must be finite and < 0");
  if (!(R >= 1.0) || !std::isfinite(R)) throw ConfigError("R", "must be finite and >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta", "must be in [0, 1]");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon", "must be in (0, 1]");
  if (relax_steps < 0) throw ConfigError("relax_steps", "must be >= 0");
  if (measure_steps < 0) throw ConfigError("measure_steps", "must be >= 0");
  if (!std::isfinite(initial_price)) throw ConfigError("initial_price", "must be finite");
}

}  // namespace emg
