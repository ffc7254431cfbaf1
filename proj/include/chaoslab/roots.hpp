#pragma once

// Bracketing root search for smooth scalar functions on a closed interval.
//
// The interval is cut into a fixed uniform grid; every cell whose end values
// change sign is narrowed by bisection and then polished with a safeguarded
// Newton iteration (a Newton step leaving the current bracket is replaced by
// a bisection step). Exact zeros on grid nodes are reported as roots.
// Scans are deterministic: the same inputs give the same roots in the same
// (ascending) order.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "chaoslab/economy.hpp"

namespace chaoslab::roots {

struct Root {
  double x;
  double residual;    // |h(x)|
  double correction;  // ~|h(x) / h'(x)|, the size of the next Newton step
};

namespace detail {
// Newton step size, with |h| padded by the rounding floor of its evaluation so
// that a flat (multiple) root reports a large uncertainty even when h happens
// to round to zero.
inline double newton_correction(double x, const IterateValue& v) {
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  if (v.derivative == 0.0) return std::numeric_limits<double>::infinity();
  return (std::abs(v.value) + floor) / std::abs(v.derivative);
}
}  // namespace detail

/// Residual and the pending Newton step are both within tol.
inline bool converged(const Root& r, double tol) {
  return r.residual <= tol && r.correction <= tol;
}

struct ScanOptions {
  int grid = 4096;          // number of cells
  int bisections = 30;      // before Newton
  int newton_iterations = 50;
};

namespace detail {

// Evaluates h and returns nullopt when h is undefined at x (DomainError) or
// not finite.
template <class Fn>
std::optional<IterateValue> safe_eval(const Fn& h, double x) {
  try {
    IterateValue v = h(x);
    if (!std::isfinite(v.value)) return std::nullopt;
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

template <class Fn>
Root refine(const Fn& h, double lo, double hi, double h_lo, const ScanOptions& opt) {
  const bool lo_negative = h_lo < 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  Root best{0.5 * (lo + hi), inf, inf};

  auto consider = [&](double x, const IterateValue& v) {
    if (std::abs(v.value) < best.residual) best = {x, std::abs(v.value), newton_correction(x, v)};
  };
  // Narrows [lo, hi] around x using the sign of h(x).
  auto shrink = [&](double x, double value) {
    if ((value < 0.0) == lo_negative)
      lo = x;
    else
      hi = x;
  };

  for (int i = 0; i < opt.bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    auto v = safe_eval(h, mid);
    if (!v) break;
    consider(mid, *v);
    if (v->value == 0.0) return best;
    shrink(mid, v->value);
  }

  double x = 0.5 * (lo + hi);
  for (int i = 0; i < opt.newton_iterations; ++i) {
    auto v = safe_eval(h, x);
    if (!v) break;
    consider(x, *v);
    if (v->value == 0.0) break;
    shrink(x, v->value);

    double next = (v->derivative != 0.0) ? x - v->value / v->derivative
                                         : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return best;
}

}  // namespace detail

/// All roots of h on [lo, hi] detected by a sign-change scan. `h` returns an
/// IterateValue {h(x), h'(x)}. Roots closer than `merge_tol` are merged,
/// keeping the one with the smaller residual. A small residual alone does not
/// make a root trustworthy near a flat (multiple) root; callers should also
/// bound `correction`.
template <class Fn>
std::vector<Root> scan(const Fn& h, double lo, double hi, const ScanOptions& opt,
                       double merge_tol) {
  std::vector<Root> found;
  const int n = opt.grid;
  std::vector<std::optional<double>> values(static_cast<size_t>(n) + 1);
  std::vector<double> nodes(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    nodes[i] = (i == n) ? hi : lo + (hi - lo) * (static_cast<double>(i) / n);
    if (auto v = detail::safe_eval(h, nodes[i])) values[i] = v->value;
  }

  for (int i = 0; i <= n; ++i) {
    if (!values[i]) continue;
    if (*values[i] == 0.0) {
      if (auto v = detail::safe_eval(h, nodes[i]))
        found.push_back({nodes[i], 0.0, detail::newton_correction(nodes[i], *v)});
      continue;
    }
    if (i == n || !values[i + 1] || *values[i + 1] == 0.0) continue;
    if ((*values[i] < 0.0) != (*values[i + 1] < 0.0))
      found.push_back(detail::refine(h, nodes[i], nodes[i + 1], *values[i], opt));
  }

  std::vector<Root> merged;
  for (const Root& r : found) {
    if (!merged.empty() && std::abs(r.x - merged.back().x) <= merge_tol) {
      if (r.residual < merged.back().residual) merged.back() = r;
      continue;
    }
    merged.push_back(r);
  }
  return merged;
}

/// Safeguarded Newton polish of a single root estimate without a bracket:
/// keeps the iterate with the smallest residual seen.
template <class Fn>
Root polish(const Fn& h, double x, int iterations = 50) {
  const double inf = std::numeric_limits<double>::infinity();
  Root best{x, inf, inf};
  for (int i = 0; i < iterations; ++i) {
    auto v = detail::safe_eval(h, x);
    if (!v) break;
    if (std::abs(v->value) < best.residual)
      best = {x, std::abs(v->value), detail::newton_correction(x, *v)};
    if (v->value == 0.0 || v->derivative == 0.0) break;
    const double next = x - v->value / v->derivative;
    if (!std::isfinite(next) || next == x) break;
    // A large jump means Newton is heading for a different root.
    if (std::abs(next - x) > 1e-3 * std::max(1.0, std::abs(x))) break;
    x = next;
  }
  return best;
}

}  // namespace chaoslab::roots
