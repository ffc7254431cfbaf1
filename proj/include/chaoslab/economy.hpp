#pragma once

// Two-consumer, two-good exchange economy and its tatonnement price map
//
//     f(p) = p + lambda * z(p),    z(p) = 2 beta / p - 4 (1 - alpha)
//
// where z is the excess demand for good x with the price of good y fixed
// at 1. f is strictly convex on (0, inf) with its minimum at
// s = sqrt(2 lambda beta).

#include <stdexcept>
#include <string>

namespace chaoslab {

/// Raised when an argument lies outside the mathematical domain of an
/// operation (non-positive price, alpha outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the adjustment speed lies outside the window
/// (lambda_g_low, lambda_max) in which the map restricted to its trapping
/// interval is a unimodal map of the class the classifier works with.
class WindowError : public std::invalid_argument {
 public:
  enum class Bound { Low, High };

  WindowError(Bound bound, double limit, const std::string& what)
      : std::invalid_argument(what), bound_(bound), limit_(limit) {}

  Bound bound() const noexcept { return bound_; }
  double limit() const noexcept { return limit_; }

 private:
  Bound bound_;
  double limit_;
};

/// Numerical self-consistency failure (two routes to the same quantity
/// disagree, a set that must be non-empty came back empty).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Tolerances {
  double cmp = 1e-12;   // threshold comparisons
  double root = 1e-10;  // root residuals
  double band = 1e-6;   // relative exclusion band around lambda_chaos
};

/// (alpha, beta, lambda) with 0 < alpha, beta < 1 and lambda > 0.
class EconomyParams {
 public:
  EconomyParams(double alpha, double beta, double lambda);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double lambda() const noexcept { return lambda_; }

  EconomyParams with_lambda(double lambda) const { return {alpha_, beta_, lambda}; }

  friend bool operator==(const EconomyParams&, const EconomyParams&) = default;

 private:
  double alpha_;
  double beta_;
  double lambda_;
};

/// Closed interval [a, b] with interior critical point m.
class TrappingInterval {
 public:
  /// Throws DomainError unless a < m < b.
  TrappingInterval(double a, double m, double b);

  double a() const noexcept { return a_; }
  double m() const noexcept { return m_; }
  double b() const noexcept { return b_; }

  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }

 private:
  double a_;
  double m_;
  double b_;
};

/// Adjustment-speed thresholds, all of the form c * beta / (1 - alpha)^2.
struct ThresholdSet {
  double lambda_g_low;  // c = 1/8: below it f(s) >= s
  double lambda_pi;     // c = 9/32: above it the decreasing-branch 2-cycle set is the fixed point alone
  double lambda_chaos;  // c = 25/72: onset of odd-period cycles
  double lambda_max;    // c = 1/2: above it f(s) <= 0

  bool in_window(double lambda) const noexcept {
    return lambda_g_low < lambda && lambda < lambda_max;
  }
};

double excess_demand(const EconomyParams& params, double p);

/// One tatonnement step. The result may be non-positive for lambda outside
/// the window; only the argument is validated.
double step(const EconomyParams& params, double p);

/// d/dp step(p) = 1 - 2 lambda beta / p^2.
double step_derivative(const EconomyParams& params, double p);

/// Value and derivative of the n-th iterate at p. Throws DomainError if an
/// intermediate iterate leaves (0, inf).
struct IterateValue {
  double value;
  double derivative;
};
IterateValue iterate_n(const EconomyParams& params, double p, int n);

double critical_point(const EconomyParams& params);

ThresholdSet thresholds(const EconomyParams& params);

/// E = [f(s), f(f(s)) + s] with m = s. Throws WindowError naming the failed
/// bound when lambda is outside (lambda_g_low, lambda_max).
TrappingInterval trapping_interval(const EconomyParams& params);

}  // namespace chaoslab
