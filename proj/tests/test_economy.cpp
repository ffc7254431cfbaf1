#include <gtest/gtest.h>

#include <cmath>

#include "chaoslab/economy.hpp"
#include "chaoslab/sampling.hpp"
#include "oracle.hpp"

using namespace chaoslab;
using oracle::q;
using oracle::Rational;

namespace {

const EconomyParams kAnchor(0.75, 0.5, 3.61);

}  // namespace

TEST(EconomyParams, RejectsOutOfRange) {
  EXPECT_THROW(EconomyParams(0.0, 0.5, 1.0), DomainError);
  EXPECT_THROW(EconomyParams(1.0, 0.5, 1.0), DomainError);
  EXPECT_THROW(EconomyParams(0.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(EconomyParams(0.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(EconomyParams(0.5, 0.5, 0.0), DomainError);
  EXPECT_THROW(EconomyParams(0.5, 0.5, -1.0), DomainError);
  EXPECT_THROW(EconomyParams(0.5, 0.5, NAN), DomainError);
  EXPECT_NO_THROW(EconomyParams(0.5, 0.5, 1e-9));
}

TEST(TrappingInterval, RejectsDegenerate) {
  EXPECT_THROW(TrappingInterval(1.0, 1.0, 2.0), DomainError);
  EXPECT_THROW(TrappingInterval(1.0, 2.0, 2.0), DomainError);
  EXPECT_THROW(TrappingInterval(2.0, 1.0, 3.0), DomainError);
}

TEST(ExcessDemand, Examples) {
  // z(p) = 2 beta / p - 4 (1 - alpha), exact rational reference.
  const Rational z19 = q(2, 1) * q(1, 2) / q(19, 10) - q(4, 1) * (q(1, 1) - q(3, 4));
  EXPECT_EQ(z19, q(-9, 19));

  EXPECT_DOUBLE_EQ(excess_demand(EconomyParams(0.75, 0.5, 1.0), 1.0), 0.0);
  EXPECT_NEAR(excess_demand(EconomyParams(0.75, 0.5, 1.0), 1.9), oracle::to_double(z19), 1e-15);
  EXPECT_DOUBLE_EQ(excess_demand(EconomyParams(0.5, 0.5, 1.0), 2.0), -1.5);
}

TEST(ExcessDemand, NonPositivePriceIsDomainError) {
  EXPECT_THROW(excess_demand(kAnchor, 0.0), DomainError);
  EXPECT_THROW(excess_demand(kAnchor, -1.0), DomainError);
  EXPECT_THROW(step(kAnchor, 0.0), DomainError);
  EXPECT_THROW(step(kAnchor, -0.5), DomainError);
}

TEST(Step, AnchorOrbitMatchesExactRationals) {
  const Rational alpha = q(3, 4), beta = q(1, 2), lambda = q(361, 100);
  const Rational f1 = oracle::tatonnement(alpha, beta, lambda, q(19, 10));
  const Rational f2 = oracle::tatonnement(alpha, beta, lambda, f1);
  EXPECT_EQ(f1, q(19, 100));
  EXPECT_EQ(f2, q(1558, 100));

  EXPECT_NEAR(step(kAnchor, 1.9), 0.19, 1e-14);
  EXPECT_NEAR(step(kAnchor, 0.19), 15.58, 1e-12);
  EXPECT_DOUBLE_EQ(step(kAnchor, 1.0), 1.0);
}

TEST(CriticalPoint, Examples) {
  EXPECT_NEAR(critical_point(kAnchor), 1.9, 1e-15);
  EXPECT_NEAR(critical_point(EconomyParams(0.75, 0.5, 2.0)), std::sqrt(2.0), 1e-15);
}

TEST(CriticalPoint, FixedAtLowerWindowEdge) {
  // lambda = beta / (8 (1 - alpha)^2): the minimum value equals the minimiser.
  const EconomyParams half(0.5, 0.5, 0.25);
  EXPECT_NEAR(critical_point(half), 0.5, 1e-15);
  EXPECT_NEAR(step(half, 0.5), 0.5, 1e-15);

  const EconomyParams edge(0.75, 0.5, 1.0);
  EXPECT_NEAR(critical_point(edge), 1.0, 1e-15);
  EXPECT_NEAR(step(edge, 1.0), 1.0, 1e-15);
}

TEST(Thresholds, Examples) {
  const ThresholdSet a = thresholds(EconomyParams(0.75, 0.5, 1.0));
  EXPECT_NEAR(a.lambda_g_low, 1.0, 1e-12);
  EXPECT_NEAR(a.lambda_pi, 2.25, 1e-12);
  EXPECT_NEAR(a.lambda_chaos, 25.0 / 9.0, 1e-12);
  EXPECT_NEAR(a.lambda_max, 4.0, 1e-12);

  const ThresholdSet b = thresholds(EconomyParams(0.5, 0.5, 1.0));
  EXPECT_NEAR(b.lambda_g_low, 0.25, 1e-12);
  EXPECT_NEAR(b.lambda_pi, 0.5625, 1e-12);
  EXPECT_NEAR(b.lambda_chaos, 25.0 / 36.0, 1e-12);
  EXPECT_NEAR(b.lambda_max, 1.0, 1e-12);
}

TEST(Thresholds, OrderingHoldsEverywhere) {
  UnitSampler rng(11);
  for (int i = 0; i < 2000; ++i) {
    const ThresholdSet t = thresholds(EconomyParams(rng.next(), rng.next(), 1.0));
    ASSERT_LT(t.lambda_g_low, t.lambda_pi);
    ASSERT_LT(t.lambda_pi, t.lambda_chaos);
    ASSERT_LT(t.lambda_chaos, t.lambda_max);
  }
}

TEST(TrappingIntervalOp, Anchor) {
  const TrappingInterval e = trapping_interval(kAnchor);
  EXPECT_NEAR(e.a(), 0.19, 1e-12);
  EXPECT_NEAR(e.m(), 1.9, 1e-12);
  EXPECT_NEAR(e.b(), 17.48, 1e-12);
}

TEST(TrappingIntervalOp, LambdaTwoAgainstHighPrecision) {
  const TrappingInterval e = trapping_interval(EconomyParams(0.75, 0.5, 2.0));
  EXPECT_NEAR(e.a(), 2.0 * std::sqrt(2.0) - 2.0, 1e-14);
  EXPECT_NEAR(e.a(), oracle::to_double(oracle::critical_orbit(0.75, 0.5, 2.0, 1)), 1e-14);
  EXPECT_NEAR(e.m(), std::sqrt(2.0), 1e-15);
  const double b = oracle::to_double(oracle::critical_orbit(0.75, 0.5, 2.0, 2)) + std::sqrt(2.0);
  EXPECT_NEAR(e.b(), b, 1e-13);
  EXPECT_NEAR(e.b(), 2.656854, 1e-6);
}

TEST(TrappingIntervalOp, RefusesOutsideWindow) {
  try {
    trapping_interval(EconomyParams(0.75, 0.5, 0.5));
    FAIL() << "expected WindowError";
  } catch (const WindowError& e) {
    EXPECT_EQ(e.bound(), WindowError::Bound::Low);
    EXPECT_DOUBLE_EQ(e.limit(), 1.0);
    EXPECT_NE(std::string(e.what()).find("λ_G_low = 1"), std::string::npos);
  }
  EXPECT_THROW(trapping_interval(EconomyParams(0.75, 0.5, 1.0)), WindowError);
  EXPECT_THROW(trapping_interval(EconomyParams(0.75, 0.5, 4.0)), WindowError);
  try {
    trapping_interval(EconomyParams(0.75, 0.5, 5.0));
    FAIL() << "expected WindowError";
  } catch (const WindowError& e) {
    EXPECT_EQ(e.bound(), WindowError::Bound::High);
  }
}

TEST(TrappingIntervalOp, InvariantsOnRandomWindowedParams) {
  UnitSampler rng(12);
  for (int i = 0; i < 1000; ++i) {
    const EconomyParams p = random_windowed(rng);
    const TrappingInterval e = trapping_interval(p);
    ASSERT_GT(e.a(), 0.0);
    ASSERT_LT(e.a(), e.m());
    ASSERT_LT(e.m(), e.b());
  }
}

TEST(StepProperties, Convexity) {
  UnitSampler rng(13);
  for (int i = 0; i < 5000; ++i) {
    const EconomyParams params(rng.next(), rng.next(), rng.uniform(0.01, 10.0));
    const double p = rng.uniform(0.01, 20.0);
    const double r = rng.uniform(0.01, 20.0);
    const double t = rng.next();
    const double lhs = step(params, t * p + (1 - t) * r);
    const double rhs = t * step(params, p) + (1 - t) * step(params, r);
    ASSERT_LE(lhs, rhs + 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(StepProperties, CriticalPointMinimises) {
  UnitSampler rng(14);
  for (int i = 0; i < 50; ++i) {
    const EconomyParams params(rng.next(), rng.next(), rng.uniform(0.01, 10.0));
    const double fs = step(params, critical_point(params));
    for (int k = 1; k <= 400; ++k) ASSERT_LE(fs, step(params, 0.05 * k) + 1e-12);
  }
}

TEST(StepProperties, FiniteDifferenceDerivative) {
  const double h = 1e-5;
  for (const EconomyParams& params : {kAnchor, EconomyParams(0.5, 0.5, 0.7), EconomyParams(0.2, 0.9, 5.0)}) {
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
      const double fd = (step(params, p + h) - step(params, p - h)) / (2 * h);
      const double exact = 1.0 - 2.0 * params.lambda() * params.beta() / (p * p);
      // Truncation error f'''(p) h^2 / 6 = 2 lambda beta h^2 / p^4, plus rounding.
      EXPECT_NEAR(fd, exact, 2.0 * params.lambda() * params.beta() * h * h / std::pow(p, 4) + 1e-9);
      EXPECT_DOUBLE_EQ(step_derivative(params, p), exact);
    }
  }
}

TEST(StepProperties, IterateDerivativeMatchesFiniteDifference) {
  const double h = 1e-7;
  for (int n : {1, 2, 3, 4}) {
    for (double p : {0.7, 1.3, 2.5}) {
      const double fd =
          (iterate_n(kAnchor, p + h, n).value - iterate_n(kAnchor, p - h, n).value) / (2 * h);
      const double d = iterate_n(kAnchor, p, n).derivative;
      EXPECT_NEAR(fd, d, 1e-4 * std::max(1.0, std::abs(d))) << "n=" << n << " p=" << p;
    }
  }
}

TEST(StepProperties, MinimumPositiveIffBelowLambdaMax) {
  UnitSampler rng(15);
  for (int i = 0; i < 2000; ++i) {
    const double alpha = rng.next(), beta = rng.next();
    const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
    const double lambda = rng.uniform(0.5 * t.lambda_g_low, 2.0 * t.lambda_max);
    if (std::abs(lambda - t.lambda_max) < 1e-9 * t.lambda_max) continue;
    const EconomyParams p(alpha, beta, lambda);
    ASSERT_EQ(step(p, critical_point(p)) > 0.0, lambda < t.lambda_max);
  }
}

TEST(StepProperties, MinimumBelowCriticalPointIffAboveLowEdge) {
  UnitSampler rng(16);
  for (int i = 0; i < 2000; ++i) {
    const double alpha = rng.next(), beta = rng.next();
    const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
    const double lambda = rng.uniform(0.1 * t.lambda_g_low, t.lambda_max);
    if (std::abs(lambda - t.lambda_g_low) < 1e-9 * t.lambda_g_low) continue;
    const EconomyParams p(alpha, beta, lambda);
    const double s = critical_point(p);
    ASSERT_EQ(step(p, s) < s, lambda > t.lambda_g_low);
  }
}
