#include "chaoslab/gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "chaoslab/roots.hpp"

namespace chaoslab {

namespace {

// Grid node i of n over [lo, hi], with the last node landing exactly on hi.
double node(double lo, double hi, int i, int n) {
  return i == n ? hi : lo + (hi - lo) * (static_cast<double>(i) / n);
}

IterateValue second_iterate_minus_identity(const EconomyParams& params, double x) {
  IterateValue v = iterate_n(params, x, 2);
  return {v.value - x, v.derivative - 1.0};
}

}  // namespace

GateReport gate_check(const EconomyParams& params, const TrappingInterval& interval, int n_grid,
                      const Tolerances& tol) {
  if (n_grid < 100) throw DomainError(fmt::format("n_grid must be >= 100, got {}", n_grid));
  const double a = interval.a();
  const double m = interval.m();
  const double b = interval.b();

  GateReport r;
  const double fa = step(params, a);
  const double fb = step(params, b);
  r.cond_endpoints = fa > a && fb < b;
  double margin = std::min(fa - a, b - fb);

  r.cond_below_diagonal = true;
  for (int i = 0; i < n_grid; ++i) {  // [m, b)
    const double x = node(m, b, i, n_grid);
    const double slack = x - step(params, x);
    margin = std::min(margin, slack);
    if (!(slack > 0.0)) r.cond_below_diagonal = false;
  }

  r.cond_unimodal = true;
  for (int i = 0; i < n_grid; ++i) {  // [a, m)
    if (!(step_derivative(params, node(a, m, i, n_grid)) < 0.0)) r.cond_unimodal = false;
  }
  for (int i = 1; i <= n_grid; ++i) {  // (m, b]
    if (!(step_derivative(params, node(m, b, i, n_grid)) > 0.0)) r.cond_unimodal = false;
  }

  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n_grid; ++i) {
    const double y = step(params, node(a, b, i, n_grid));
    lowest = std::min(lowest, y);
    highest = std::max(highest, y);
  }
  r.cond_self_map = lowest >= a - tol.cmp && highest <= b;
  margin = std::min(margin, b - highest);

  r.margin = margin;
  r.in_class_g = r.cond_endpoints && r.cond_below_diagonal && r.cond_unimodal && r.cond_self_map;
  return r;
}

double fixed_point(const EconomyParams& params) {
  return params.beta() / (2.0 * (1.0 - params.alpha()));
}

std::optional<Period2Orbit> period2_points(const EconomyParams& params) {
  const double lambda = params.lambda();
  const double k = 2.0 * lambda * (1.0 - params.alpha());
  const double disc = k * k - params.beta() * lambda;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);

  auto h = [&](double x) { return second_iterate_minus_identity(params, x); };
  auto refine = [&](double w) {
    const roots::Root r = roots::polish(h, w);
    const double start = std::abs(h(w).value);
    return r.residual < start ? r.x : w;
  };
  Period2Orbit out{refine(k - root), refine(k + root)};
  if (out.w1 > out.w2) std::swap(out.w1, out.w2);
  return out;
}

PiSet pi_set(const EconomyParams& params, const TrappingInterval& interval, const Tolerances& tol) {
  const double a = interval.a();
  const double m = interval.m();
  const int grid = 4096;
  const double cell = (m - a) / grid;
  const double merge = 10.0 * tol.root;

  std::vector<double> preferred{fixed_point(params)};
  if (auto w = period2_points(params)) {
    preferred.push_back(w->w1);
    preferred.push_back(w->w2);
  }

  auto h = [&](double x) { return second_iterate_minus_identity(params, x); };
  std::vector<double> candidates = preferred;
  for (const roots::Root& r : roots::scan(h, a, m, {.grid = grid}, merge)) {
    if (!roots::converged(r, tol.root)) continue;
    // Closed forms win over any grid root found in the same cell.
    const bool shadowed = std::any_of(preferred.begin(), preferred.end(),
                                      [&](double p) { return std::abs(p - r.x) <= cell; });
    if (!shadowed) candidates.push_back(r.x);
  }

  const double slack = tol.cmp * std::max(1.0, std::abs(m));
  auto in_branch = [&](double x) { return x >= a - slack && x <= m + slack; };

  std::vector<double> accepted;
  for (double x : candidates) {
    if (!in_branch(x)) continue;
    double fx;
    try {
      fx = step(params, x);
      if (!in_branch(fx)) continue;
      if (!(std::abs(step(params, fx) - x) <= tol.root)) continue;
    } catch (const DomainError&) {
      continue;
    }
    accepted.push_back(x);
  }
  std::sort(accepted.begin(), accepted.end());

  PiSet out;
  for (double x : accepted) {
    if (!out.points.empty() && x - out.points.back() <= merge) continue;
    out.points.push_back(x);
  }
  if (out.points.empty())
    throw InternalError(fmt::format("empty 2-cycle set on [{}, {}]; the fixed point {} must qualify",
                                    a, m, fixed_point(params)));
  return out;
}

std::string_view to_string(Method method) {
  return method == Method::ClosedForm ? "closed_form" : "numerical";
}

ChaosVerdict classify_closed_form(const EconomyParams& params) {
  const ThresholdSet t = thresholds(params);
  if (!(params.lambda() > t.lambda_g_low))
    throw WindowError(WindowError::Bound::Low, t.lambda_g_low,
                      fmt::format("λ ≤ λ_G_low = {}", t.lambda_g_low));
  if (!(params.lambda() < t.lambda_max))
    throw WindowError(WindowError::Bound::High, t.lambda_max,
                      fmt::format("λ ≥ λ_max = {}", t.lambda_max));

  const double lambda = params.lambda();
  const double drift = 4.0 * (1.0 - params.alpha());
  const double s = critical_point(params);
  const double a = 2.0 * s - lambda * drift;  // f(s), since 2 lambda beta / s = s
  const double f2 = a + lambda * (2.0 * params.beta() / a - drift);
  const double f3 = f2 + lambda * (2.0 * params.beta() / f2 - drift);

  ChaosVerdict v;
  v.method = Method::ClosedForm;
  v.m = s;
  v.f2_of_m = f2;
  v.f3_of_m = f3;
  v.pi_min = v.pi_max = fixed_point(params);
  if (lambda <= t.lambda_pi) {
    if (auto w = period2_points(params)) {
      v.pi_min = w->w1;
      v.pi_max = w->w2;
    }
  }
  v.odd_cycle = t.lambda_chaos < lambda && lambda < t.lambda_max;
  v.turbulent_second_iterate = t.lambda_chaos <= lambda && lambda < t.lambda_max;
  return v;
}

ChaosVerdict classify_numerical(const EconomyParams& params, const TrappingInterval& interval,
                                const Tolerances& tol) {
  const double m = interval.m();
  const PiSet pi = pi_set(params, interval, tol);

  ChaosVerdict v;
  v.method = Method::Numerical;
  v.m = m;
  v.f2_of_m = iterate_n(params, m, 2).value;
  v.f3_of_m = step(params, v.f2_of_m);
  v.pi_min = pi.min();
  v.pi_max = pi.max();
  const bool returns_above = v.f2_of_m > m + tol.cmp;
  v.odd_cycle = returns_above && v.f3_of_m > v.pi_max + tol.cmp;
  v.turbulent_second_iterate = returns_above && v.f3_of_m >= v.pi_min - tol.cmp;
  return v;
}

SecondReturnReport second_return_check(const EconomyParams& params) {
  const ThresholdSet t = thresholds(params);
  const double s = critical_point(params);
  const double f2_minus_m = iterate_n(params, s, 2).value - s;
  const double lambda = params.lambda();
  return {f2_minus_m, lambda < t.lambda_g_low || t.lambda_pi < lambda, f2_minus_m < 0.0};
}

ThirdReturnReport third_return_check(const EconomyParams& params) {
  const TrappingInterval e = trapping_interval(params);
  const double z = fixed_point(params);
  const double f2 = iterate_n(params, e.m(), 2).value;
  const double f3 = step(params, f2);

  ThirdReturnReport r;
  r.f3_minus_z = f3 - z;
  r.factor1 = f2 - z;
  r.factor2 = 1.0 - 2.0 * params.beta() * params.lambda() / (f2 * z);
  r.factored = r.factor1 * r.factor2;
  if (!(std::abs(r.f3_minus_z - r.factored) <= 1e-9 * std::max(1.0, std::abs(r.f3_minus_z))))
    throw InternalError(fmt::format("f^3(s) - z: direct {} vs factored {}", r.f3_minus_z,
                                    r.factored));
  return r;
}

}  // namespace chaoslab
