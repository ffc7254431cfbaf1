#include "chaoslab/sweep.hpp"

#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "chaoslab/detail/parallel.hpp"
#include "chaoslab/gate.hpp"
#include "chaoslab/numfmt.hpp"

namespace chaoslab {

std::vector<double> Range::values() const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(std::max(count, 0)));
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i)
    out.push_back(i == count - 1 ? hi : lo + (hi - lo) * (static_cast<double>(i) / (count - 1)));
  return out;
}

namespace {

void validate_range(const Range& r, std::string_view name, bool unit_interval) {
  if (r.count < 1) throw ConfigError(fmt::format("{}: count must be >= 1, got {}", name, r.count));
  if (r.count > 1 && !(r.lo < r.hi))
    throw ConfigError(fmt::format("{}: need lo < hi when count > 1, got {} .. {}", name, r.lo, r.hi));
  const double top = r.count > 1 ? r.hi : r.lo;
  if (unit_interval && !(r.lo > 0.0 && top < 1.0))
    throw ConfigError(fmt::format("{}: values must lie in (0,1), got {} .. {}", name, r.lo, top));
  if (!unit_interval && !(r.lo > 0.0))
    throw ConfigError(fmt::format("{}: values must be positive, got {}", name, r.lo));
}

std::string methods_label(const MethodSet& m) {
  if (m.closed_form && m.numerical) return "closed_form,numerical";
  return m.closed_form ? "closed_form" : "numerical";
}

template <class T>
T get_typed(const nlohmann::json& value, std::string_view key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("config key '{}' has the wrong type", key));
  }
}

std::string cell(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }
std::string cell(const std::optional<bool>& v) {
  return v ? std::string(*v ? "true" : "false") : std::string();
}

template <class T>
nlohmann::ordered_json nullable(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

MethodSet parse_methods(std::string_view text) {
  MethodSet m{false, false};
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "closed_form" || item == "closed")
      m.closed_form = true;
    else if (item == "numerical")
      m.numerical = true;
    else
      throw ConfigError(fmt::format("unknown method '{}'", item));
  }
  return m;
}

void SweepConfig::validate() const {
  validate_range(alpha, "alpha_range", true);
  validate_range(beta, "beta_range", true);
  if (const auto* abs = std::get_if<LambdaAbsolute>(&lambda))
    validate_range(abs->range, "lambda_range", false);
  else if (std::get<LambdaWindowRelative>(lambda).count < 1)
    throw ConfigError("lambda window count must be >= 1");
  if (!methods.closed_form && !methods.numerical) throw ConfigError("no method selected");
  if (jobs < 1) throw ConfigError(fmt::format("jobs must be >= 1, got {}", jobs));
  if (gate_grid < 100) throw ConfigError(fmt::format("grid density must be >= 100, got {}", gate_grid));
  if (!(tol.cmp >= 0.0) || !(tol.root > 0.0)) throw ConfigError("tolerances must be positive");
  if (output_path.empty()) throw ConfigError("empty output path");
}

void SweepConfig::apply_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  std::optional<std::string> mode;
  Range lambda_range;
  int lambda_count = -1;
  if (const auto* abs = std::get_if<LambdaAbsolute>(&lambda)) lambda_range = abs->range;

  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha_lo") alpha.lo = get_typed<double>(value, key);
    else if (key == "alpha_hi") alpha.hi = get_typed<double>(value, key);
    else if (key == "alpha_count") alpha.count = get_typed<int>(value, key);
    else if (key == "beta_lo") beta.lo = get_typed<double>(value, key);
    else if (key == "beta_hi") beta.hi = get_typed<double>(value, key);
    else if (key == "beta_count") beta.count = get_typed<int>(value, key);
    else if (key == "lambda_mode") mode = get_typed<std::string>(value, key);
    else if (key == "lambda_lo") lambda_range.lo = get_typed<double>(value, key);
    else if (key == "lambda_hi") lambda_range.hi = get_typed<double>(value, key);
    else if (key == "lambda_count") lambda_count = get_typed<int>(value, key);
    else if (key == "methods") methods = parse_methods(get_typed<std::string>(value, key));
    else if (key == "output_path") output_path = get_typed<std::string>(value, key);
    else if (key == "output_format") {
      const auto f = get_typed<std::string>(value, key);
      if (f == "csv") output_format = OutputFormat::CSV;
      else if (f == "json") output_format = OutputFormat::JSON;
      else throw ConfigError(fmt::format("unknown output_format '{}'", f));
    }
    else if (key == "jobs") jobs = get_typed<int>(value, key);
    else if (key == "eps_cmp") tol.cmp = get_typed<double>(value, key);
    else if (key == "eps_root") tol.root = get_typed<double>(value, key);
    else throw ConfigError(fmt::format("unknown config key '{}'", key));
  }

  const bool absolute = mode ? *mode == "absolute" : std::holds_alternative<LambdaAbsolute>(lambda);
  if (mode && *mode != "absolute" && *mode != "window")
    throw ConfigError(fmt::format("unknown lambda_mode '{}'", *mode));
  if (absolute) {
    if (lambda_count >= 0) lambda_range.count = lambda_count;
    lambda = LambdaAbsolute{lambda_range};
  } else if (lambda_count >= 0 || mode) {
    lambda = LambdaWindowRelative{
        lambda_count >= 0 ? lambda_count
                          : std::holds_alternative<LambdaWindowRelative>(lambda)
                                ? std::get<LambdaWindowRelative>(lambda).count
                                : 50};
  }
}

SweepRow evaluate_cell(const EconomyParams& params, const MethodSet& methods, const Tolerances& tol,
                       int gate_grid) {
  SweepRow row;
  row.alpha = params.alpha();
  row.beta = params.beta();
  row.lambda = params.lambda();
  row.thresholds = thresholds(params);
  if (!row.thresholds.in_window(params.lambda())) return row;

  std::optional<TrappingInterval> interval;
  try {
    interval = trapping_interval(params);
  } catch (const WindowError&) {
    return row;  // f(s) rounded to a non-positive price at the upper edge
  }
  row.in_class_g = gate_check(params, *interval, gate_grid, tol).in_class_g;

  if (methods.closed_form) {
    const ChaosVerdict cf = classify_closed_form(params);
    row.odd_cycle_cf = cf.odd_cycle;
    row.turbulent_cf = cf.turbulent_second_iterate;
    row.f2_of_m = cf.f2_of_m;
    row.f3_of_m = cf.f3_of_m;
    row.pi_max = cf.pi_max;
  }
  if (methods.numerical && row.in_class_g) {
    const ChaosVerdict num = classify_numerical(params, *interval, tol);
    row.odd_cycle_num = num.odd_cycle;
    row.turbulent_num = num.turbulent_second_iterate;
    row.f2_of_m = num.f2_of_m;
    row.f3_of_m = num.f3_of_m;
    row.pi_max = num.pi_max;
  }
  if (row.odd_cycle_cf && row.odd_cycle_num)
    row.agree = *row.odd_cycle_cf == *row.odd_cycle_num && *row.turbulent_cf == *row.turbulent_num;
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  struct Cell {
    double alpha, beta, lambda;
  };
  std::vector<Cell> cells;
  for (double alpha : config.alpha.values()) {
    for (double beta : config.beta.values()) {
      if (const auto* abs = std::get_if<LambdaAbsolute>(&config.lambda)) {
        for (double lambda : abs->range.values()) cells.push_back({alpha, beta, lambda});
      } else {
        const int n = std::get<LambdaWindowRelative>(config.lambda).count;
        const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
        for (int k = 1; k <= n; ++k)
          cells.push_back({alpha, beta,
                           t.lambda_g_low + (t.lambda_max - t.lambda_g_low) *
                                                (static_cast<double>(k) / (n + 1))});
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    const Cell& c = cells[i];
    rows[i] = evaluate_cell(EconomyParams(c.alpha, c.beta, c.lambda), config.methods, config.tol,
                            config.gate_grid);
  });
  return rows;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns{
      "alpha",        "beta",          "lambda",       "lambda_g_low", "lambda_pi",
      "lambda_chaos", "lambda_max",    "in_class_g",   "f2_of_m",      "f3_of_m",
      "pi_max",       "odd_cycle_cf",  "turbulent_cf", "odd_cycle_num", "turbulent_num",
      "agree"};
  return columns;
}

std::vector<std::string> sweep_metadata(const SweepConfig& config) {
  auto range = [](const Range& r) { return fmt::format("{}:{}:{}", fmt17(r.lo), fmt17(r.hi), r.count); };
  std::vector<std::string> meta{
      fmt::format("chaoslab {}", kToolVersion),
      "command: sweep",
      "alpha_range: " + range(config.alpha),
      "beta_range: " + range(config.beta),
  };
  if (const auto* abs = std::get_if<LambdaAbsolute>(&config.lambda))
    meta.push_back("lambda: absolute " + range(abs->range));
  else
    meta.push_back(fmt::format("lambda: window {}", std::get<LambdaWindowRelative>(config.lambda).count));
  meta.push_back("methods: " + methods_label(config.methods));
  meta.push_back("eps_cmp: " + fmt17(config.tol.cmp));
  meta.push_back("eps_root: " + fmt17(config.tol.root));
  return meta;
}

nlohmann::ordered_json to_json(const SweepRow& row) {
  return nlohmann::ordered_json{
      {"alpha", row.alpha},
      {"beta", row.beta},
      {"lambda", row.lambda},
      {"lambda_g_low", row.thresholds.lambda_g_low},
      {"lambda_pi", row.thresholds.lambda_pi},
      {"lambda_chaos", row.thresholds.lambda_chaos},
      {"lambda_max", row.thresholds.lambda_max},
      {"in_class_g", row.in_class_g},
      {"f2_of_m", nullable(row.f2_of_m)},
      {"f3_of_m", nullable(row.f3_of_m)},
      {"pi_max", nullable(row.pi_max)},
      {"odd_cycle_cf", nullable(row.odd_cycle_cf)},
      {"turbulent_cf", nullable(row.turbulent_cf)},
      {"odd_cycle_num", nullable(row.odd_cycle_num)},
      {"turbulent_num", nullable(row.turbulent_num)},
      {"agree", nullable(row.agree)},
  };
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows,
               const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) out << "# " << line << '\n';
  const auto& cols = sweep_columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const SweepRow& r : rows) {
    out << fmt17(r.alpha) << ',' << fmt17(r.beta) << ',' << fmt17(r.lambda) << ','
        << fmt17(r.thresholds.lambda_g_low) << ',' << fmt17(r.thresholds.lambda_pi) << ','
        << fmt17(r.thresholds.lambda_chaos) << ',' << fmt17(r.thresholds.lambda_max) << ','
        << (r.in_class_g ? "true" : "false") << ',' << cell(r.f2_of_m) << ',' << cell(r.f3_of_m)
        << ',' << cell(r.pi_max) << ',' << cell(r.odd_cycle_cf) << ',' << cell(r.turbulent_cf)
        << ',' << cell(r.odd_cycle_num) << ',' << cell(r.turbulent_num) << ',' << cell(r.agree)
        << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<SweepRow>& rows,
                const std::vector<std::string>& metadata) {
  nlohmann::ordered_json doc;
  doc["meta"] = metadata;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const SweepRow& r : rows) doc["rows"].push_back(to_json(r));
  out << doc.dump(2) << '\n';
}

}  // namespace chaoslab
