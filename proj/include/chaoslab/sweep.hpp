#pragma once

// Parameter sweeps over (alpha, beta, lambda), evaluating both classifiers
// per cell, with CSV / JSON emission.

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chaoslab/economy.hpp"

namespace chaoslab {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// `count` evenly spaced values from lo to hi inclusive; count == 1 gives lo.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

struct LambdaAbsolute {
  Range range;
};

/// lambda_k = low + (max - low) * k / (count + 1), k = 1..count, strictly
/// inside each cell's (lambda_g_low, lambda_max).
struct LambdaWindowRelative {
  int count = 1;
};

using LambdaMode = std::variant<LambdaAbsolute, LambdaWindowRelative>;

enum class OutputFormat { CSV, JSON };

struct MethodSet {
  bool closed_form = true;
  bool numerical = true;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Comma-separated subset of {closed_form, numerical}. Throws ConfigError.
MethodSet parse_methods(std::string_view text);

struct SweepConfig {
  Range alpha{0.05, 0.95, 20};
  Range beta{0.05, 0.95, 20};
  LambdaMode lambda = LambdaWindowRelative{50};
  MethodSet methods;
  std::string output_path = "-";  // "-" is stdout
  OutputFormat output_format = OutputFormat::CSV;
  int jobs = 1;
  int gate_grid = 1000;
  Tolerances tol;

  /// Throws ConfigError.
  void validate() const;

  /// Overlays the keys present in a flat key-value JSON object: alpha_lo,
  /// alpha_hi, alpha_count, beta_*, lambda_mode ("window" | "absolute"),
  /// lambda_lo, lambda_hi, lambda_count, methods ("closed_form,numerical"),
  /// output_path, output_format ("csv" | "json"), jobs, eps_cmp, eps_root.
  /// Unknown keys and wrongly typed values throw ConfigError.
  void apply_json(const nlohmann::json& doc);
};

struct SweepRow {
  double alpha;
  double beta;
  double lambda;
  ThresholdSet thresholds;
  bool in_class_g = false;
  // Blank (nullopt) outside the window or when the method was not run.
  std::optional<double> f2_of_m;
  std::optional<double> f3_of_m;
  std::optional<double> pi_max;
  std::optional<bool> odd_cycle_cf;
  std::optional<bool> turbulent_cf;
  std::optional<bool> odd_cycle_num;
  std::optional<bool> turbulent_num;
  std::optional<bool> agree;
};

SweepRow evaluate_cell(const EconomyParams& params, const MethodSet& methods,
                       const Tolerances& tol = {}, int gate_grid = 1000);

/// Rows in alpha-major, then beta, then lambda order. Cells are evaluated on
/// up to `config.jobs` threads; the order does not depend on it.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// Column names, in CSV order; JSON rows use the same keys.
const std::vector<std::string>& sweep_columns();

std::vector<std::string> sweep_metadata(const SweepConfig& config);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows,
               const std::vector<std::string>& metadata);
void write_json(std::ostream& out, const std::vector<SweepRow>& rows,
                const std::vector<std::string>& metadata);

nlohmann::ordered_json to_json(const SweepRow& row);

}  // namespace chaoslab
