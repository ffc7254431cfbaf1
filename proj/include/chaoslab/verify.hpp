#pragma once

// Cross-validation suite: closed-form thresholds against the numerical
// unimodal-map criterion, the 2-cycle set, the f^3(s) factorisation, the
// f^2(s) sign rule and low-period orbit search against the closed forms.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chaoslab/economy.hpp"

namespace chaoslab {

struct VerifyOptions {
  int grid = 20;            // alpha and beta points over [0.05, 0.95]
  int lambda_count = 50;    // window-relative lambda points per (alpha, beta)
  int random_count = 1000;  // random windowed triples for classifier agreement
  int oracle_count = 100;   // random windowed triples for the orbit / factorisation checks
  int jobs = 1;
  Tolerances tol;
};

struct CheckResult {
  std::string name;
  bool asserted = true;  // informational checks never fail the run
  long cells = 0;
  long skipped = 0;  // inside an exclusion band
  long failures = 0;
  std::string first_failure;

  bool passed() const { return !asserted || failures == 0; }
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool ok() const;
  const CheckResult* first_failed() const;
};

/// Deterministic: no wall-clock data, fixed sampling seed.
VerifyReport run_verify(const VerifyOptions& options);

void print_report(std::ostream& out, const VerifyReport& report);

/// Relative distance |lambda - threshold| / threshold.
inline bool within_band(double lambda, double threshold, double band) {
  return std::abs(lambda - threshold) <= band * threshold;
}

}  // namespace chaoslab
