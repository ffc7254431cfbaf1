#pragma once

// Trajectories and numerical certificates for the tatonnement map: periodic
// orbits located as roots of f^n(x) - x, odd-period cycles, turbulence
// witnesses for f^2, and an exploratory period-3 scan. None of these use
// the closed-form thresholds.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "chaoslab/economy.hpp"

namespace chaoslab {

inline constexpr double kEscapeGuard = 1e12;
inline constexpr std::int64_t kMaxSteps = 10'000'000;

struct Orbit {
  double p0;
  std::vector<double> points;  // points[0] == p0, points[t + 1] == step(points[t])
  bool escaped = false;        // the next iterate left (0, kEscapeGuard)
};

/// Throws DomainError for p0 <= 0 or n_steps outside [1, kMaxSteps].
Orbit iterate(const EconomyParams& params, double p0, std::int64_t n_steps);

struct PeriodicOrbit {
  int period;
  std::vector<double> points;  // starts at the smallest point, then follows the map
  double residual;             // max over points of |f^period(x) - x|
};

struct TurbulenceWitness {
  double x1;
  double x2;
  double x3;
  std::array<double, 3> residuals;  // |g(x1) - x1|, |g(x2) - x1|, |g(x3) - x2| with g = f^2
};

struct OrbitSearchOptions {
  int grid_density = 8192;    // scan cells per unit of period on [a, b]
  int period3_grid = 65536;
  Tolerances tol;
};

/// What was searched; reported with every result so that "not found" is
/// never read as "does not exist".
struct SearchBounds {
  double lo;
  double hi;
  int max_period;
  int grid_cells;  // cells used by the finest scan
  double eps_root;
};

template <class T>
struct SearchResult {
  std::optional<T> found;
  SearchBounds bounds;
};

/// All orbits of minimal period 1..max_period (max_period <= 20) found on
/// the interval, ordered by period and then by smallest point.
std::vector<PeriodicOrbit> find_periodic_orbits(const EconomyParams& params,
                                                const TrappingInterval& interval, int max_period,
                                                const OrbitSearchOptions& opts = {});

/// Orbit of the smallest odd minimal period >= 3 up to max_period.
SearchResult<PeriodicOrbit> find_odd_cycle(const EconomyParams& params,
                                           const TrappingInterval& interval, int max_period,
                                           const OrbitSearchOptions& opts = {});

/// Points x1, x2, x3 with g(x1) = g(x2) = x1, g(x3) = x2 and x3 strictly
/// between x1 and x2, for g = f^2. For each fixed point x1 of g (ascending),
/// preimages x2 are tried nearest first.
SearchResult<TurbulenceWitness> find_turbulence_witness(const EconomyParams& params,
                                                        const TrappingInterval& interval,
                                                        const OrbitSearchOptions& opts = {});

/// Fine scan for an orbit of minimal period exactly 3. Exploratory: either
/// outcome is acceptable and nothing is inferred from it.
SearchResult<PeriodicOrbit> search_period3(const EconomyParams& params,
                                           const TrappingInterval& interval,
                                           const OrbitSearchOptions& opts = {});

}  // namespace chaoslab
