#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace frostdecay {

/// mt19937_64 with portable conversions: the standard distributions are
/// implementation-defined, so seeded outputs would differ across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., count - 1}.
  std::uint64_t below(std::uint64_t count) { return count == 0 ? 0 : bits() % count; }
  /// Standard normal (Box-Muller).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace frostdecay
