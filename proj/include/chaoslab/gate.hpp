#pragma once

// Unimodal-map class membership and the odd-cycle / turbulence classifier.
//
// A map g on [a, b] belongs to the class when it is strictly decreasing on
// [a, m], strictly increasing on [m, b], maps [a, b] into itself, and has
// g(a) > a, g(b) < b and g(x) < x on [m, b). For such maps, with
//
//     Pi = { x in [a, m] : g(x) in [a, m] and g(g(x)) = x },
//
// g has an odd-period cycle iff g^2(m) > m and g^3(m) > max Pi, and g^2 is
// turbulent iff g^2(m) > m and g^3(m) >= min Pi. For the tatonnement map
// both conditions reduce to closed-form bounds on lambda; this header
// exposes both routes so they can be checked against each other.

#include <optional>
#include <string_view>
#include <vector>

#include "chaoslab/economy.hpp"

namespace chaoslab {

struct GateReport {
  bool in_class_g = false;
  bool cond_endpoints = false;       // g(a) > a and g(b) < b
  bool cond_below_diagonal = false;  // g(x) < x on [m, b)
  bool cond_unimodal = false;        // g' < 0 on [a, m), g' > 0 on (m, b]
  bool cond_self_map = false;        // g([a, b]) within [a, b]
  double margin = 0.0;               // smallest slack among the strict inequalities
};

/// Grid-based membership test; n_grid >= 100 points per sub-grid.
GateReport gate_check(const EconomyParams& params, const TrappingInterval& interval,
                      int n_grid = 1000, const Tolerances& tol = {});

/// The unique positive fixed point beta / (2 (1 - alpha)).
double fixed_point(const EconomyParams& params);

struct Period2Orbit {
  double w1;  // w1 <= w2, step(w1) == w2
  double w2;
};

/// The 2-cycle 2 lambda (1 - alpha) -/+ sqrt(4 lambda^2 (1 - alpha)^2 - beta lambda),
/// Newton-polished on f^2(x) - x. Empty when the discriminant is negative.
std::optional<Period2Orbit> period2_points(const EconomyParams& params);

struct PiSet {
  std::vector<double> points;  // ascending

  double min() const { return points.front(); }
  double max() const { return points.back(); }
  bool singleton() const { return points.size() == 1; }
};

/// Throws InternalError if no point qualifies.
PiSet pi_set(const EconomyParams& params, const TrappingInterval& interval,
             const Tolerances& tol = {});

enum class Method { ClosedForm, Numerical };

std::string_view to_string(Method method);

struct ChaosVerdict {
  bool odd_cycle = false;
  bool turbulent_second_iterate = false;
  double m = 0.0;
  double f2_of_m = 0.0;
  double f3_of_m = 0.0;
  double pi_max = 0.0;
  double pi_min = 0.0;
  Method method = Method::ClosedForm;
};

/// Odd cycle iff lambda_chaos < lambda < lambda_max; turbulent second iterate
/// iff lambda_chaos <= lambda < lambda_max. Audit fields come from the
/// closed forms (f(s) = 2s - 4 lambda (1 - alpha), Pi from the fixed point and
/// 2-cycle formulas). Throws WindowError outside the window.
ChaosVerdict classify_closed_form(const EconomyParams& params);

/// Applies the unimodal-map criterion to directly iterated f^2(m), f^3(m)
/// and a numerically assembled Pi. Requires a passing gate_check.
ChaosVerdict classify_numerical(const EconomyParams& params, const TrappingInterval& interval,
                                const Tolerances& tol = {});

/// Sign of f^2(s) - s: the directly computed value next to the rule
/// "f^2(s) < s iff lambda < lambda_g_low or lambda > lambda_pi" as it is
/// usually stated. Direct evaluation disagrees with that rule above
/// lambda_pi; both are reported and nothing is asserted.
struct SecondReturnReport {
  double f2_minus_m;
  bool stated_rule_predicts_below;
  bool observed_below;

  bool discrepancy() const { return stated_rule_predicts_below != observed_below; }
};

SecondReturnReport second_return_check(const EconomyParams& params);

/// f^3(s) - z by direct iteration and by the factorisation
/// (f^2(s) - z) (1 - 2 beta lambda / (f^2(s) z)), z the fixed point.
/// Throws InternalError if the two disagree by more than
/// 1e-9 * max(1, |direct|). Requires lambda inside the window.
struct ThirdReturnReport {
  double f3_minus_z;  // direct
  double factored;
  double factor1;  // f^2(s) - z
  double factor2;  // 1 - 2 beta lambda / (f^2(s) z)
};

ThirdReturnReport third_return_check(const EconomyParams& params);

}  // namespace chaoslab
