#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "surecost/model.hpp"

namespace surecost {

/// 64-bit Mersenne Twister with a fixed uniform conversion (top 53 bits), so
/// streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn from `d`.
  std::uint32_t sample(const Distribution& d) {
    const auto entries = d.entries();
    double u = uniform() * d.mass();
    for (const auto& [i, w] : entries) {
      if (u < w) return i;
      u -= w;
    }
    return entries.back().first;
  }

  /// Position drawn from nonnegative `weights`.
  std::size_t sample(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      if (u < weights[i]) return i;
      u -= weights[i];
      last = i;
    }
    return last;
  }

  /// Uniform position in [0, n).
  std::size_t pick(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace surecost
