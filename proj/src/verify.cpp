#include "chaoslab/verify.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "chaoslab/detail/parallel.hpp"
#include "chaoslab/gate.hpp"
#include "chaoslab/numfmt.hpp"
#include "chaoslab/orbit.hpp"
#include "chaoslab/sampling.hpp"
#include "chaoslab/sweep.hpp"

namespace chaoslab {

namespace {

constexpr std::uint64_t kSeed = 0x5eed'c4a0'5ab1'e001ULL;

// Outcome of one cell of one check.
struct Outcome {
  enum Kind { Pass, Skip, Fail } kind = Pass;
  std::string detail;
};

std::string where(const EconomyParams& p) {
  return fmt::format("alpha={} beta={} lambda={}", fmt17(p.alpha()), fmt17(p.beta()),
                     fmt17(p.lambda()));
}

std::vector<EconomyParams> grid_cells(const VerifyOptions& o) {
  std::vector<EconomyParams> cells;
  const Range axis{0.05, 0.95, o.grid};
  for (double alpha : axis.values()) {
    for (double beta : axis.values()) {
      const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
      for (int k = 1; k <= o.lambda_count; ++k)
        cells.emplace_back(alpha, beta,
                           t.lambda_g_low + (t.lambda_max - t.lambda_g_low) *
                                                (static_cast<double>(k) / (o.lambda_count + 1)));
    }
  }
  return cells;
}

std::vector<EconomyParams> random_cells(int count, std::uint64_t seed) {
  UnitSampler rng(seed);
  std::vector<EconomyParams> cells;
  for (int i = 0; i < count; ++i) cells.push_back(random_windowed(rng));
  return cells;
}

CheckResult run_check(std::string name, bool asserted, const std::vector<EconomyParams>& cells,
                      int jobs, const std::function<Outcome(const EconomyParams&)>& fn) {
  std::vector<Outcome> outcomes(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    try {
      outcomes[i] = fn(cells[i]);
    } catch (const std::exception& e) {
      outcomes[i] = {Outcome::Fail, fmt::format("{}: {}", where(cells[i]), e.what())};
    }
  });
  CheckResult r;
  r.name = std::move(name);
  r.asserted = asserted;
  for (const Outcome& o : outcomes) {
    ++r.cells;
    if (o.kind == Outcome::Skip) ++r.skipped;
    if (o.kind == Outcome::Fail && r.failures++ == 0) r.first_failure = o.detail;
  }
  return r;
}

Outcome agreement(const EconomyParams& p, const Tolerances& tol, bool band_around_pi) {
  const ThresholdSet t = thresholds(p);
  if (within_band(p.lambda(), t.lambda_chaos, tol.band) ||
      (band_around_pi && within_band(p.lambda(), t.lambda_pi, tol.band)))
    return {Outcome::Skip, {}};
  const TrappingInterval e = trapping_interval(p);
  const GateReport gate = gate_check(p, e, 1000, tol);
  if (!gate.in_class_g) return {Outcome::Fail, where(p) + ": gate check failed inside the window"};
  const ChaosVerdict cf = classify_closed_form(p);
  const ChaosVerdict num = classify_numerical(p, e, tol);
  if (cf.odd_cycle != num.odd_cycle || cf.turbulent_second_iterate != num.turbulent_second_iterate)
    return {Outcome::Fail,
            fmt::format("{}: closed_form odd={} turbulent={}, numerical odd={} turbulent={}", where(p),
                        cf.odd_cycle, cf.turbulent_second_iterate, num.odd_cycle,
                        num.turbulent_second_iterate)};
  if (num.odd_cycle && !num.turbulent_second_iterate)
    return {Outcome::Fail, where(p) + ": odd cycle without turbulent second iterate"};
  return {};
}

Outcome pi_singleton(const EconomyParams& p, const Tolerances& tol) {
  const ThresholdSet t = thresholds(p);
  if (!(p.lambda() > t.lambda_pi)) return {Outcome::Skip, {}};
  if (within_band(p.lambda(), t.lambda_pi, tol.band)) return {Outcome::Skip, {}};
  const TrappingInterval e = trapping_interval(p);
  const PiSet pi = pi_set(p, e, tol);
  const double z = fixed_point(p);
  if (!pi.singleton() || std::abs(pi.points[0] - z) > 1e-10)
    return {Outcome::Fail, fmt::format("{}: |Pi| = {}, min = {}, fixed point {}", where(p),
                                       pi.points.size(), fmt17(pi.min()), fmt17(z))};
  return {};
}

Outcome factorisation(const EconomyParams& p) {
  const ThirdReturnReport r = third_return_check(p);
  if (std::abs(r.f3_minus_z - r.factored) > 1e-9)
    return {Outcome::Fail, fmt::format("{}: direct {} vs factored {}", where(p), fmt17(r.f3_minus_z),
                                       fmt17(r.factored))};
  return {};
}

Outcome factor2_sign(const EconomyParams& p, const Tolerances& tol) {
  const ThresholdSet t = thresholds(p);
  if (within_band(p.lambda(), t.lambda_chaos, tol.band)) return {Outcome::Skip, {}};
  const ThirdReturnReport r = third_return_check(p);
  if ((r.factor2 > 0.0) != (p.lambda() > t.lambda_chaos))
    return {Outcome::Fail, fmt::format("{}: factor2 = {} but lambda_chaos = {}", where(p),
                                       fmt17(r.factor2), fmt17(t.lambda_chaos))};
  return {};
}

// Period-2 points from the expanded quadratic, independent of period2_points.
std::optional<std::pair<double, double>> expanded_period2(const EconomyParams& p) {
  const double al = p.alpha(), be = p.beta(), la = p.lambda();
  const double disc = 4 * al * al * la * la - 8 * al * la * la - be * la + 4 * la * la;
  if (disc < 0.0) return std::nullopt;
  const double c = -2 * al * la + 2 * la;
  return std::pair{c - std::sqrt(disc), c + std::sqrt(disc)};
}

Outcome low_period_oracle(const EconomyParams& p, const Tolerances& tol) {
  const TrappingInterval e = trapping_interval(p);
  OrbitSearchOptions opts;
  opts.tol = tol;
  const auto orbits = find_periodic_orbits(p, e, 2, opts);
  std::vector<const PeriodicOrbit*> fixed, two;
  for (const auto& o : orbits) (o.period == 1 ? fixed : two).push_back(&o);

  const double z = fixed_point(p);
  if (fixed.size() != 1 || std::abs(fixed[0]->points[0] - z) > 1e-9)
    return {Outcome::Fail, fmt::format("{}: {} fixed points found, expected {}", where(p),
                                       fixed.size(), fmt17(z))};
  const auto w = expanded_period2(p);
  if (!w) {
    if (!two.empty()) return {Outcome::Fail, where(p) + ": 2-cycle found with negative discriminant"};
    return {};
  }
  if (two.size() != 1)
    return {Outcome::Fail, fmt::format("{}: {} 2-cycles found, expected 1", where(p), two.size())};
  const double lo = std::min(two[0]->points[0], two[0]->points[1]);
  const double hi = std::max(two[0]->points[0], two[0]->points[1]);
  if (std::abs(lo - w->first) > 1e-9 || std::abs(hi - w->second) > 1e-9)
    return {Outcome::Fail, fmt::format("{}: 2-cycle ({}, {}) vs closed form ({}, {})", where(p),
                                       fmt17(lo), fmt17(hi), fmt17(w->first), fmt17(w->second))};
  return {};
}

}  // namespace

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

const CheckResult* VerifyReport::first_failed() const {
  for (const auto& c : checks)
    if (!c.passed()) return &c;
  return nullptr;
}

VerifyReport run_verify(const VerifyOptions& o) {
  const Tolerances tol = o.tol;
  const auto grid = grid_cells(o);
  const auto agree_random = random_cells(o.random_count, kSeed);
  const auto oracle_random = random_cells(o.oracle_count, kSeed + 1);

  VerifyReport rep;
  rep.checks.push_back(run_check("classifier agreement, grid", true, grid, o.jobs,
                                 [&](const EconomyParams& p) { return agreement(p, tol, false); }));
  rep.checks.push_back(run_check("classifier agreement, random", true, agree_random, o.jobs,
                                 [&](const EconomyParams& p) { return agreement(p, tol, true); }));
  rep.checks.push_back(run_check("2-cycle set is {z} above lambda_pi", true, grid, o.jobs,
                                 [&](const EconomyParams& p) { return pi_singleton(p, tol); }));
  rep.checks.push_back(run_check("f3(s)-z factorisation, random", true, oracle_random, o.jobs,
                                 factorisation));
  rep.checks.push_back(run_check("factor2 > 0 iff lambda > lambda_chaos", true, grid, o.jobs,
                                 [&](const EconomyParams& p) { return factor2_sign(p, tol); }));
  rep.checks.push_back(run_check("period <= 2 orbits vs closed forms", true, oracle_random, o.jobs,
                                 [&](const EconomyParams& p) { return low_period_oracle(p, tol); }));

  // The commonly stated rule for the sign of f2(s) - s, reported only.
  rep.checks.push_back(run_check("stated f2(s) < s rule", false, grid, o.jobs,
                                 [](const EconomyParams& p) {
                                   const SecondReturnReport r = second_return_check(p);
                                   if (!r.discrepancy()) return Outcome{};
                                   return Outcome{Outcome::Fail,
                                                  fmt::format("{}: f2(s) - s = {:+.17g}", where(p),
                                                              r.f2_minus_m)};
                                 }));
  rep.checks.push_back(run_check("f2(s) > s iff lambda > lambda_pi", false, grid, o.jobs,
                                 [&](const EconomyParams& p) {
                                   const ThresholdSet t = thresholds(p);
                                   if (within_band(p.lambda(), t.lambda_pi, tol.band))
                                     return Outcome{Outcome::Skip, {}};
                                   const SecondReturnReport r = second_return_check(p);
                                   if ((r.f2_minus_m > 0.0) == (p.lambda() > t.lambda_pi))
                                     return Outcome{};
                                   return Outcome{Outcome::Fail, where(p)};
                                 }));

  {
    const EconomyParams anchor(0.75, 0.5, 3.61);
    const SecondReturnReport r = second_return_check(anchor);
    rep.notes.push_back(fmt::format(
        "second return at (alpha, beta, lambda) = (0.75, 0.5, 3.61): f2(s) - s = {:+.17g}; "
        "stated rule predicts f2(s) {} s; observed f2(s) {} s{}",
        r.f2_minus_m, r.stated_rule_predicts_below ? "<" : ">=", r.observed_below ? "<" : ">",
        r.discrepancy() ? " [DISCREPANCY, informational]" : ""));
  }
  {
    long disagree = 0;
    long counted = 0;
    for (const EconomyParams& p : grid) {
      const ThresholdSet t = thresholds(p);
      if (within_band(p.lambda(), t.lambda_chaos, tol.band)) continue;
      const double unsquared = 25.0 * p.beta() / (72.0 * (1.0 - p.alpha()));
      ++counted;
      if ((p.lambda() > unsquared) != (p.lambda() > t.lambda_chaos)) ++disagree;
    }
    rep.notes.push_back(fmt::format(
        "odd-cycle onset uses 25 beta / (72 (1 - alpha)^2); the unsquared variant "
        "25 beta / (72 (1 - alpha)) gives a different verdict on {} of {} grid cells",
        disagree, counted));
  }
  return rep;
}

void print_report(std::ostream& out, const VerifyReport& rep) {
  out << fmt::format("chaoslab {} verify\n", kToolVersion);
  out << fmt::format("{:<42} {:<6} {:>7} {:>8} {:>9}  {}\n", "check", "kind", "cells", "skipped",
                     "failures", "status");
  for (const CheckResult& c : rep.checks) {
    const char* status = !c.asserted ? "INFO" : (c.passed() ? "PASS" : "FAIL");
    out << fmt::format("{:<42} {:<6} {:>7} {:>8} {:>9}  {}\n", c.name, c.asserted ? "assert" : "info",
                       c.cells, c.skipped, c.failures, status);
  }
  out << "notes:\n";
  for (const auto& n : rep.notes) out << "  " << n << '\n';
  for (const CheckResult& c : rep.checks)
    if (!c.asserted && c.failures > 0)
      out << fmt::format("  {}: first differing cell {}\n", c.name, c.first_failure);
  if (const CheckResult* f = rep.first_failed())
    out << fmt::format("result: FAIL ({}: {})\n", f->name, f->first_failure);
  else
    out << "result: PASS\n";
}

}  // namespace chaoslab
