#include <gtest/gtest.h>

#include <sstream>

#include "nebv/csv.hpp"
#include "nebv/oracle_check.hpp"

using namespace nebv;

TEST(OracleCheck, ErrorsShrinkWithSampleSize) {
  OracleCheckConfig cfg;
  cfg.p_grid = {200, 20000};
  cfg.repeats = 5;
  cfg.seed = 3;
  const auto report = run_oracle_check(cfg);
  ASSERT_EQ(report.summary.size(), 2u);
  EXPECT_LT(report.summary[1].median_sup_error, report.summary[0].median_sup_error);
  EXPECT_NEAR(report.summary[0].domain_upper, 1.9746, 1e-3);
  for (const auto& r : report.records) {
    EXPECT_LT(r.argmax_s2, r.domain_upper);
    EXPECT_GT(r.n_in_domain, 0u);
  }
}

TEST(OracleCheck, NestedDeltasShareSamples) {
  OracleCheckConfig cfg;
  cfg.p_grid = {500};
  cfg.delta_grid = {0.1, 0.01};
  cfg.repeats = 4;
  const auto report = run_oracle_check(cfg);
  ASSERT_EQ(report.records.size(), 8u);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto& wide = report.records[r * 2 + 1];
    const auto& narrow = report.records[r * 2];
    EXPECT_GT(wide.domain_upper, narrow.domain_upper);
    EXPECT_GE(wide.sup_error, narrow.sup_error);
    EXPECT_GE(wide.n_in_domain, narrow.n_in_domain);
  }
}

TEST(OracleCheck, PointMassPriorTracksConstantRule) {
  OracleCheckConfig cfg;
  cfg.prior = PriorSpec::point_mass(1.0);
  cfg.p_grid = {50000};
  cfg.repeats = 2;
  cfg.delta_grid = {0.05};
  const auto report = run_oracle_check(cfg);
  EXPECT_LT(report.summary[0].max_sup_error, 0.1);
}

TEST(OracleCheck, RejectsUndefinedRule) {
  OracleCheckConfig cfg;
  cfg.prior = PriorSpec::inverse_gamma(0.5, 1.0);
  cfg.k = DegreesOfFreedom(3);
  EXPECT_THROW(run_oracle_check(cfg), std::invalid_argument);
  cfg = OracleCheckConfig{};
  cfg.repeats = 0;
  EXPECT_THROW(run_oracle_check(cfg), std::invalid_argument);
}

TEST(OracleCheck, CsvColumns) {
  OracleCheckConfig cfg;
  cfg.p_grid = {100};
  cfg.repeats = 3;
  const auto report = run_oracle_check(cfg);
  std::ostringstream s, d;
  write_oracle_summary_csv(report, s);
  write_oracle_detail_csv(report, d);
  const auto rows = parse_delimited(s.str(), "summary");
  EXPECT_EQ(rows[0].cells, (std::vector<std::string>{"p", "delta", "domain_upper", "median_sup_error",
                                                     "mean_sup_error", "max_sup_error", "repeats"}));
  EXPECT_EQ(parse_delimited(d.str(), "detail").size(), 4u);
}
