#include "chaoslab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "chaoslab/roots.hpp"

namespace chaoslab {

namespace {

constexpr int kMaxPeriod = 20;

// Points already attributed to an accepted orbit; lookups are tolerance-based.
class ClaimedPoints {
 public:
  explicit ClaimedPoints(double tol) : tol_(tol) {}

  bool contains(double x) const {
    auto it = points_.lower_bound(x - tol_);
    return it != points_.end() && *it <= x + tol_;
  }
  void insert(const std::vector<double>& xs) { points_.insert(xs.begin(), xs.end()); }

 private:
  double tol_;
  std::set<double> points_;
};

class PeriodScanner {
 public:
  PeriodScanner(const EconomyParams& params, const TrappingInterval& interval,
                const OrbitSearchOptions& opts)
      : params_(params), interval_(interval), opts_(opts), claimed_(10.0 * opts.tol.root) {}

  // Orbits of minimal period n not already claimed by an earlier call. Calls
  // must be made for every divisor of n first.
  std::vector<PeriodicOrbit> scan(int n, int grid_cells) {
    const double eps = opts_.tol.root;
    auto h = [&](double x) {
      IterateValue v = iterate_n(params_, x, n);
      return IterateValue{v.value - x, v.derivative - 1.0};
    };

    std::vector<PeriodicOrbit> out;
    for (const roots::Root& r :
         roots::scan(h, interval_.a(), interval_.b(), {.grid = grid_cells}, 10.0 * eps)) {
      if (!roots::converged(r, eps) || claimed_.contains(r.x)) continue;
      if (has_smaller_period(r.x, n)) continue;
      if (auto orbit = build(r.x, n, h)) {
        claimed_.insert(orbit->points);
        out.push_back(std::move(*orbit));
      }
    }
    std::sort(out.begin(), out.end(),
              [](const PeriodicOrbit& l, const PeriodicOrbit& r) { return l.points[0] < r.points[0]; });
    return out;
  }

 private:
  bool has_smaller_period(double x, int n) const {
    for (int d = 1; d < n; ++d) {
      if (n % d != 0) continue;
      if (std::abs(iterate_n(params_, x, d).value - x) <= opts_.tol.root / 10.0) return true;
    }
    return false;
  }

  template <class Fn>
  std::optional<PeriodicOrbit> build(double x, int n, const Fn& h) const {
    const double eps = opts_.tol.root;
    std::vector<double> pts(static_cast<size_t>(n));
    pts[0] = x;
    for (int k = 1; k < n; ++k) pts[k] = step(params_, pts[k - 1]);

    double residual = 0.0;
    for (double& p : pts) {
      const roots::Root polished = roots::polish(h, p);
      const double before = std::abs(h(p).value);
      if (polished.residual < before) p = polished.x;
      residual = std::max(residual, std::min(before, polished.residual));
    }
    if (residual > eps) return std::nullopt;

    std::vector<double> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] - sorted[i - 1] <= 10.0 * eps) return std::nullopt;
    if (std::any_of(pts.begin(), pts.end(), [&](double p) { return claimed_.contains(p); }))
      return std::nullopt;

    std::rotate(pts.begin(), std::min_element(pts.begin(), pts.end()), pts.end());
    return PeriodicOrbit{n, std::move(pts), residual};
  }

  const EconomyParams& params_;
  const TrappingInterval& interval_;
  const OrbitSearchOptions& opts_;
  ClaimedPoints claimed_;
};

void check_period(int max_period) {
  if (max_period < 1 || max_period > kMaxPeriod)
    throw DomainError(fmt::format("max_period must lie in [1, {}], got {}", kMaxPeriod, max_period));
}

}  // namespace

Orbit iterate(const EconomyParams& params, double p0, std::int64_t n_steps) {
  if (!(p0 > 0.0) || !std::isfinite(p0))
    throw DomainError(fmt::format("initial price must be positive, got {}", p0));
  if (n_steps < 1 || n_steps > kMaxSteps)
    throw DomainError(fmt::format("n_steps must lie in [1, {}], got {}", kMaxSteps, n_steps));

  Orbit orbit{p0, {p0}, false};
  orbit.points.reserve(static_cast<size_t>(std::min<std::int64_t>(n_steps, 1 << 20)) + 1);
  double p = p0;
  for (std::int64_t t = 0; t < n_steps; ++t) {
    const double next = step(params, p);
    if (!(next > 0.0 && next < kEscapeGuard)) {
      orbit.escaped = true;
      break;
    }
    orbit.points.push_back(next);
    p = next;
  }
  return orbit;
}

std::vector<PeriodicOrbit> find_periodic_orbits(const EconomyParams& params,
                                                const TrappingInterval& interval, int max_period,
                                                const OrbitSearchOptions& opts) {
  check_period(max_period);
  PeriodScanner scanner(params, interval, opts);
  std::vector<PeriodicOrbit> all;
  for (int n = 1; n <= max_period; ++n) {
    auto found = scanner.scan(n, opts.grid_density * n);
    all.insert(all.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  return all;
}

SearchResult<PeriodicOrbit> find_odd_cycle(const EconomyParams& params,
                                           const TrappingInterval& interval, int max_period,
                                           const OrbitSearchOptions& opts) {
  check_period(max_period);
  SearchResult<PeriodicOrbit> result{
      std::nullopt,
      {interval.a(), interval.b(), max_period, opts.grid_density * max_period, opts.tol.root}};
  // Divisors of odd periods are odd, so even periods never need scanning.
  PeriodScanner scanner(params, interval, opts);
  for (int n = 1; n <= max_period; n += 2) {
    auto found = scanner.scan(n, opts.grid_density * n);
    if (n >= 3 && !found.empty()) {
      result.found = std::move(found.front());
      break;
    }
  }
  return result;
}

SearchResult<TurbulenceWitness> find_turbulence_witness(const EconomyParams& params,
                                                        const TrappingInterval& interval,
                                                        const OrbitSearchOptions& opts) {
  const double eps = opts.tol.root;
  const double sep = 10.0 * eps;
  const int cells = 2 * opts.grid_density;
  SearchResult<TurbulenceWitness> result{
      std::nullopt, {interval.a(), interval.b(), 2, cells, eps}};

  auto g = [&](double x) { return iterate_n(params, x, 2); };
  auto level = [&](double target) {
    return [&g, target](double x) {
      IterateValue v = g(x);
      return IterateValue{v.value - target, v.derivative};
    };
  };
  auto fixed = [&](double x) {
    IterateValue v = g(x);
    return IterateValue{v.value - x, v.derivative - 1.0};
  };

  const double a = interval.a();
  const double b = interval.b();
  for (const roots::Root& r1 : roots::scan(fixed, a, b, {.grid = cells}, sep)) {
    if (!roots::converged(r1, eps)) continue;
    const double x1 = r1.x;

    std::vector<roots::Root> preimages;
    for (const roots::Root& r2 : roots::scan(level(x1), a, b, {.grid = cells}, sep))
      if (roots::converged(r2, eps) && std::abs(r2.x - x1) > sep) preimages.push_back(r2);
    std::stable_sort(preimages.begin(), preimages.end(),
                     [x1](const roots::Root& l, const roots::Root& r) {
                       return std::abs(l.x - x1) < std::abs(r.x - x1);
                     });

    for (const roots::Root& r2 : preimages) {
      const double x2 = r2.x;
      const double lo = std::min(x1, x2);
      const double hi = std::max(x1, x2);
      for (const roots::Root& r3 : roots::scan(level(x2), lo, hi, {.grid = cells}, sep)) {
        if (!roots::converged(r3, eps) || !(r3.x > lo + sep && r3.x < hi - sep)) continue;
        result.found = TurbulenceWitness{x1, x2, r3.x, {r1.residual, r2.residual, r3.residual}};
        return result;
      }
    }
  }
  return result;
}

SearchResult<PeriodicOrbit> search_period3(const EconomyParams& params,
                                           const TrappingInterval& interval,
                                           const OrbitSearchOptions& opts) {
  SearchResult<PeriodicOrbit> result{
      std::nullopt, {interval.a(), interval.b(), 3, opts.period3_grid, opts.tol.root}};
  PeriodScanner scanner(params, interval, opts);
  scanner.scan(1, opts.grid_density);
  auto found = scanner.scan(3, opts.period3_grid);
  if (!found.empty()) result.found = std::move(found.front());
  return result;
}

}  // namespace chaoslab
