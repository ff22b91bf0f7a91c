#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace emg {

/// Anything that yields uniform draws on [0, 1). The engine is written against
/// this so tests can script the exact sequence of draws.
template <class S>
concept UniformSource = requires(S& s) {
  { s.uniform() } -> std::convertible_to<double>;
};

/// Per-run random stream. mt19937_64 output is fixed by the standard and the
/// double is built from the top 53 bits, so a seed yields the same stream on
/// every conforming platform (std::uniform_real_distribution does not).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace emg
