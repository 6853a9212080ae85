#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "chamber/common.hpp"

namespace chamber {

/// Seeded stream with counter-based derivation: stream k of master seed s is
/// independent of scheduling, so ensembles reproduce regardless of thread
/// count. Distributions are generated by explicit inverse-CDF / Box-Muller
/// formulas to keep byte-level reproducibility across standard libraries.
class RngStream {
 public:
  explicit RngStream(uint64_t master_seed, uint64_t stream_index = 0)
      : gen_(derive(master_seed, stream_index)) {}

  uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  /// Standard normal (Box-Muller, pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  static uint64_t derive(uint64_t seed, uint64_t index) {
    // splitmix64 over the (seed, index) pair
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chamber
