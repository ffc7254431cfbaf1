#pragma once

// Reproducible parameter sampling. std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries, so doubles are built
// directly from the top 53 bits of mt19937_64 output.

#include <cstdint>
#include <random>

#include "chaoslab/economy.hpp"

namespace chaoslab {

class UnitSampler {
 public:
  explicit UnitSampler(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on the open interval (0, 1).
  double next() {
    for (;;) {
      const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 gen_;
};

/// alpha, beta uniform on (lo, hi); lambda uniform strictly inside
/// (lambda_g_low, lambda_max).
inline EconomyParams random_windowed(UnitSampler& rng, double lo = 0.05, double hi = 0.95) {
  const double alpha = rng.uniform(lo, hi);
  const double beta = rng.uniform(lo, hi);
  const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
  double lambda;
  do {
    lambda = rng.uniform(t.lambda_g_low, t.lambda_max);
  } while (!t.in_window(lambda));
  return EconomyParams(alpha, beta, lambda);
}

}  // namespace chaoslab
