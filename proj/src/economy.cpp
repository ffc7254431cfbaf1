#include "chaoslab/economy.hpp"

#include <cmath>

#include <fmt/format.h>

namespace chaoslab {

EconomyParams::EconomyParams(double alpha, double beta, double lambda)
    : alpha_(alpha), beta_(beta), lambda_(lambda) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError(fmt::format("alpha must lie in (0,1), got {}", alpha));
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError(fmt::format("beta must lie in (0,1), got {}", beta));
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError(fmt::format("lambda must be positive and finite, got {}", lambda));
}

TrappingInterval::TrappingInterval(double a, double m, double b) : a_(a), m_(m), b_(b) {
  if (!(a < m && m < b))
    throw DomainError(fmt::format("degenerate interval: need a < m < b, got [{}, {}, {}]", a, m, b));
}

double excess_demand(const EconomyParams& params, double p) {
  if (!(p > 0.0)) throw DomainError(fmt::format("price must be positive, got {}", p));
  return 2.0 * params.beta() / p - 4.0 * (1.0 - params.alpha());
}

double step(const EconomyParams& params, double p) {
  return p + params.lambda() * excess_demand(params, p);
}

double step_derivative(const EconomyParams& params, double p) {
  if (!(p > 0.0)) throw DomainError(fmt::format("price must be positive, got {}", p));
  return 1.0 - 2.0 * params.lambda() * params.beta() / (p * p);
}

IterateValue iterate_n(const EconomyParams& params, double p, int n) {
  IterateValue out{p, 1.0};
  for (int k = 0; k < n; ++k) {
    out.derivative *= step_derivative(params, out.value);
    out.value = step(params, out.value);
  }
  return out;
}

double critical_point(const EconomyParams& params) {
  return std::sqrt(2.0 * params.lambda() * params.beta());
}

ThresholdSet thresholds(const EconomyParams& params) {
  const double beta = params.beta();
  const double alpha = params.alpha();
  ThresholdSet t{
      beta / (8.0 * (1.0 - alpha) * (1.0 - alpha)),
      9.0 * beta / (32.0 * (1.0 - alpha) * (1.0 - alpha)),
      25.0 * beta / (72.0 * (1.0 - alpha) * (1.0 - alpha)),
      beta / (2.0 * (1.0 - alpha) * (1.0 - alpha)),
  };
  if (!(t.lambda_g_low < t.lambda_pi && t.lambda_pi < t.lambda_chaos &&
        t.lambda_chaos < t.lambda_max))
    throw InternalError("threshold ordering violated");
  return t;
}

TrappingInterval trapping_interval(const EconomyParams& params) {
  const ThresholdSet t = thresholds(params);
  if (!(params.lambda() > t.lambda_g_low))
    throw WindowError(WindowError::Bound::Low, t.lambda_g_low,
                      fmt::format("λ ≤ λ_G_low = {}", t.lambda_g_low));
  if (!(params.lambda() < t.lambda_max))
    throw WindowError(WindowError::Bound::High, t.lambda_max,
                      fmt::format("λ ≥ λ_max = {}", t.lambda_max));
  const double s = critical_point(params);
  const double a = step(params, s);
  if (!(a > 0.0))
    throw WindowError(WindowError::Bound::High, t.lambda_max,
                      fmt::format("λ ≥ λ_max = {} (f(s) = {} is not a price)", t.lambda_max, a));
  const double b = step(params, a) + s;
  return TrappingInterval(a, s, b);
}

}  // namespace chaoslab
