#include <gtest/gtest.h>

#include <sstream>

#include <fmt/format.h>

#include "chaoslab/gate.hpp"
#include "chaoslab/numfmt.hpp"
#include "chaoslab/sweep.hpp"

using namespace chaoslab;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.alpha = {0.25, 0.75, 3};
  c.beta = {0.25, 0.75, 2};
  c.lambda = LambdaWindowRelative{4};
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Range, Values) {
  EXPECT_EQ((Range{0.5, 0.9, 1}.values()), std::vector<double>{0.5});
  const auto v = Range{0.05, 0.95, 20}.values();
  ASSERT_EQ(v.size(), 20u);
  EXPECT_DOUBLE_EQ(v.front(), 0.05);
  EXPECT_DOUBLE_EQ(v.back(), 0.95);
  EXPECT_NEAR(v[1] - v[0], 0.9 / 19, 1e-15);
}

TEST(NumFormat, RoundTripsAndFractions) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(fmt17(25.0 / 9.0)), 25.0 / 9.0);
  EXPECT_DOUBLE_EQ(parse_real("361/100"), 3.61);
  EXPECT_DOUBLE_EQ(parse_real("0.75"), 0.75);
  EXPECT_DOUBLE_EQ(parse_real("25/9"), 25.0 / 9.0);
  EXPECT_THROW(parse_real("abc"), std::invalid_argument);
  EXPECT_THROW(parse_real("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_real("0.5x"), std::invalid_argument);
  EXPECT_THROW(parse_real(""), std::invalid_argument);
}

TEST(ParseMethods, Subsets) {
  MethodSet m = parse_methods("closed_form,numerical");
  EXPECT_TRUE(m.closed_form && m.numerical);
  m = parse_methods("numerical");
  EXPECT_FALSE(m.closed_form);
  EXPECT_TRUE(m.numerical);
  EXPECT_THROW(parse_methods("magic"), ConfigError);
}

TEST(SweepConfig, Validation) {
  SweepConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = {0.0, 0.5, 3};
  EXPECT_THROW(c.validate(), ConfigError);
  c = SweepConfig{};
  c.beta = {0.5, 0.4, 3};
  EXPECT_THROW(c.validate(), ConfigError);
  c = SweepConfig{};
  c.alpha.count = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SweepConfig{};
  c.methods = {false, false};
  EXPECT_THROW(c.validate(), ConfigError);
  c = SweepConfig{};
  c.lambda = LambdaWindowRelative{0};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SweepConfig, FlatJsonOverlay) {
  SweepConfig c;
  c.apply_json(nlohmann::json::parse(R"({"alpha_lo": 0.2, "alpha_hi": 0.8, "alpha_count": 4,
      "lambda_mode": "absolute", "lambda_lo": 1.5, "lambda_hi": 3.5, "lambda_count": 5,
      "methods": "closed_form", "output_format": "json", "jobs": 3, "eps_cmp": 1e-11})"));
  EXPECT_DOUBLE_EQ(c.alpha.lo, 0.2);
  EXPECT_EQ(c.alpha.count, 4);
  ASSERT_TRUE(std::holds_alternative<LambdaAbsolute>(c.lambda));
  EXPECT_EQ(std::get<LambdaAbsolute>(c.lambda).range.count, 5);
  EXPECT_DOUBLE_EQ(std::get<LambdaAbsolute>(c.lambda).range.hi, 3.5);
  EXPECT_FALSE(c.methods.numerical);
  EXPECT_EQ(c.output_format, OutputFormat::JSON);
  EXPECT_EQ(c.jobs, 3);
  EXPECT_DOUBLE_EQ(c.tol.cmp, 1e-11);

  c.apply_json(nlohmann::json::parse(R"({"lambda_mode": "window", "lambda_count": 7})"));
  ASSERT_TRUE(std::holds_alternative<LambdaWindowRelative>(c.lambda));
  EXPECT_EQ(std::get<LambdaWindowRelative>(c.lambda).count, 7);

  EXPECT_THROW(c.apply_json(nlohmann::json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(c.apply_json(nlohmann::json::parse(R"({"jobs": "many"})")), ConfigError);
  EXPECT_THROW(c.apply_json(nlohmann::json::parse(R"({"lambda_mode": "log"})")), ConfigError);
  EXPECT_THROW(c.apply_json(nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST(RunSweep, RowCountAndOrder) {
  const SweepConfig c = small_config();
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 3u * 2u * 4u);
  std::size_t i = 0;
  for (double alpha : c.alpha.values()) {
    for (double beta : c.beta.values()) {
      const ThresholdSet t = thresholds(EconomyParams(alpha, beta, 1.0));
      for (int k = 1; k <= 4; ++k, ++i) {
        EXPECT_EQ(rows[i].alpha, alpha);
        EXPECT_EQ(rows[i].beta, beta);
        EXPECT_NEAR(rows[i].lambda, t.lambda_g_low + (t.lambda_max - t.lambda_g_low) * k / 5.0, 1e-14);
        EXPECT_TRUE(rows[i].in_class_g);
        ASSERT_TRUE(rows[i].agree.has_value());
        EXPECT_TRUE(*rows[i].agree);
      }
    }
  }
}

TEST(RunSweep, JobsDoNotChangeOutput) {
  SweepConfig c = small_config();
  std::ostringstream one, four;
  write_csv(one, run_sweep(c), sweep_metadata(c));
  c.jobs = 4;
  write_csv(four, run_sweep(c), {});
  const auto a = lines(one.str());
  const auto b = lines(four.str());
  // Metadata differs only in the absent lines; compare header and rows.
  ASSERT_GE(a.size(), b.size());
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.end() - static_cast<long>(b.size())));
}

TEST(RunSweep, OutsideWindowIsBlank) {
  SweepConfig c;
  c.alpha = {0.75, 0.75, 1};
  c.beta = {0.5, 0.5, 1};
  c.lambda = LambdaAbsolute{{0.5, 5.0, 4}};  // 0.5, 2, 3.5, 5
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i : {0u, 3u}) {
    EXPECT_FALSE(rows[i].in_class_g);
    EXPECT_FALSE(rows[i].f2_of_m || rows[i].f3_of_m || rows[i].pi_max);
    EXPECT_FALSE(rows[i].odd_cycle_cf || rows[i].turbulent_cf || rows[i].odd_cycle_num ||
                 rows[i].turbulent_num || rows[i].agree);
  }
  EXPECT_TRUE(rows[1].in_class_g);
  EXPECT_FALSE(*rows[1].odd_cycle_cf);
  EXPECT_TRUE(*rows[2].odd_cycle_num);

  std::ostringstream out;
  write_csv(out, rows, {});
  const auto l = lines(out.str());
  EXPECT_EQ(l[1], fmt::format("0.75,0.5,0.5,1,2.25,{},4,false,,,,,,,,", fmt17(25.0 / 9.0)));
}

TEST(RunSweep, ClosedFormOnlyLeavesAgreeBlank) {
  SweepConfig c = small_config();
  c.methods = {true, false};
  for (const SweepRow& r : run_sweep(c)) {
    EXPECT_TRUE(r.odd_cycle_cf.has_value());
    EXPECT_FALSE(r.odd_cycle_num.has_value());
    EXPECT_FALSE(r.agree.has_value());
  }
}

TEST(RunSweep, SingleCellMatchesClassify) {
  SweepConfig c;
  c.alpha = {0.75, 0.75, 1};
  c.beta = {0.5, 0.5, 1};
  c.lambda = LambdaAbsolute{{3.61, 3.61, 1}};
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 1u);
  const EconomyParams p(0.75, 0.5, 3.61);
  const ChaosVerdict cf = classify_closed_form(p);
  const ChaosVerdict num = classify_numerical(p, trapping_interval(p));
  EXPECT_EQ(*rows[0].odd_cycle_cf, cf.odd_cycle);
  EXPECT_EQ(*rows[0].odd_cycle_num, num.odd_cycle);
  EXPECT_EQ(*rows[0].turbulent_num, num.turbulent_second_iterate);
  EXPECT_EQ(*rows[0].f2_of_m, num.f2_of_m);
  EXPECT_EQ(*rows[0].f3_of_m, num.f3_of_m);
  EXPECT_TRUE(*rows[0].agree);
}

TEST(RunSweep, ChaosOnsetRatioIsConstant) {
  SweepConfig c;
  c.alpha = {0.05, 0.95, 19};
  c.beta = {0.5, 0.5, 1};
  c.lambda = LambdaWindowRelative{1};
  c.methods = {true, false};
  for (const SweepRow& r : run_sweep(c)) {
    EXPECT_NEAR(r.thresholds.lambda_chaos / r.thresholds.lambda_max, 25.0 / 36.0, 1e-14);
  }
}

TEST(WriteCsv, HeaderMetadataAndPrecision) {
  SweepConfig c = small_config();
  std::ostringstream out;
  write_csv(out, run_sweep(c), sweep_metadata(c));
  const auto l = lines(out.str());
  std::size_t i = 0;
  while (i < l.size() && l[i].rfind("# ", 0) == 0) ++i;
  ASSERT_GT(i, 0u);
  EXPECT_EQ(l[0], fmt::format("# chaoslab {}", kToolVersion));
  std::string header;
  for (const auto& col : sweep_columns()) header += (header.empty() ? "" : ",") + col;
  EXPECT_EQ(l[i], header);
  EXPECT_EQ(l.size() - i - 1, 24u);
  // Every float field must parse back to the value that produced it.
  const auto rows = run_sweep(c);
  std::istringstream row(l[i + 1]);
  std::string alpha, beta, lambda;
  std::getline(row, alpha, ',');
  std::getline(row, beta, ',');
  std::getline(row, lambda, ',');
  EXPECT_EQ(std::stod(lambda), rows[0].lambda);
  EXPECT_EQ(lambda, fmt17(rows[0].lambda));
}

TEST(WriteJson, MirrorsColumns) {
  SweepConfig c = small_config();
  std::ostringstream out;
  write_json(out, run_sweep(c), sweep_metadata(c));
  const auto doc = nlohmann::json::parse(out.str());
  ASSERT_EQ(doc["rows"].size(), 24u);
  std::vector<std::string> keys;
  const auto ordered = nlohmann::ordered_json::parse(out.str());
  for (const auto& [k, v] : ordered["rows"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, sweep_columns());
  EXPECT_TRUE(doc["meta"].is_array());
}
