#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nebv/csv.hpp"
#include "nebv/estimators.hpp"
#include "nebv/harness.hpp"

using namespace nebv;

namespace {

Scenario small_scenario() {
  Scenario s;
  s.id = "unit";
  s.p = 200;
  s.k = DegreesOfFreedom(8);
  s.prior = PriorSpec::inverse_gamma(3, 1);
  s.x_grid = {0.2, 0.8};
  s.reps = 20;
  s.seed = 42;
  return s;
}

}  // namespace

TEST(Harness, IndependentOfThreadCount) {
  const auto s = small_scenario();
  RunOptions one, three;
  three.threads = 3;
  std::ostringstream a, b;
  write_metrics_csv(run_scenario(s, one), a);
  write_metrics_csv(run_scenario(s, three), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Harness, ShapeAndCoverageStandardError) {
  const auto s = small_scenario();
  const auto m = run_scenario(s);
  EXPECT_EQ(m.methods, (std::vector<std::string>{"nebv", "sample_variance", "bonferroni"}));
  EXPECT_EQ(m.rows.size(), 6u);
  EXPECT_EQ(m.records.size(), 2u * 20u * 3u);
  for (const auto& row : m.rows) {
    const double c = row.coverage.value;
    EXPECT_DOUBLE_EQ(row.coverage.mc_se, std::sqrt(c * (1 - c) / 20.0));
    if (row.method == kBonferroniName) {
      EXPECT_TRUE(std::isnan(row.risk_l1.value));
      EXPECT_DOUBLE_EQ(row.length_ratio.value, 1.0);
    } else {
      EXPECT_GE(row.risk_l1.value, 0.0);
    }
  }
}

TEST(Harness, RecordsAgreeWithSummary) {
  const auto m = run_scenario(small_scenario());
  double covered = 0.0;
  for (const auto& r : m.records) {
    if (r.grid_index == 1 && m.methods[r.method] == "nebv") covered += r.covered;
  }
  EXPECT_DOUBLE_EQ(m.at(1, "nebv").coverage.value, covered / 20.0);
  EXPECT_THROW(m.at(5, "nebv"), std::out_of_range);
}

TEST(Harness, NebvRecoversPointMassVariance) {
  // The selected coordinate tends to have a small S^2, where the estimate is
  // noisiest; an independent numpy run puts ~89% of replications within 10%.
  Scenario s = small_scenario();
  s.p = 3000;
  s.prior = PriorSpec::point_mass(1.0);
  s.x_grid = {0.5};
  s.reps = 100;
  s.estimators = {"nebv"};
  const auto m = run_scenario(s);
  std::vector<double> est;
  int close = 0;
  for (const auto& r : m.records) {
    if (r.method != 0) continue;
    est.push_back(r.sigma2_hat);
    close += std::abs(r.sigma2_hat - 1.0) < 0.1;
  }
  EXPECT_GE(close, 80);
  std::sort(est.begin(), est.end());
  EXPECT_NEAR(0.5 * (est[49] + est[50]), 1.0, 0.05);
}

TEST(Harness, BonferroniCoversAtNominalLevel) {
  Scenario s = small_scenario();
  s.p = 500;
  s.reps = 1000;
  s.x_grid = {0.5};
  s.estimators = {"sample_variance"};
  RunOptions opt;
  opt.keep_records = false;
  const auto m = run_scenario(s, opt);
  EXPECT_GE(m.at(0, kBonferroniName).coverage.value, 0.95 - 3.0 * std::sqrt(0.95 * 0.05 / 1000));
  EXPECT_TRUE(m.records.empty());
}

TEST(Harness, FailureNamesReplicationAndSeed) {
  class Failing final : public VarianceEstimator {
   public:
    std::string name() const override { return "always_fails"; }
    std::vector<double> estimate(std::span<const double>, DegreesOfFreedom) const override {
      throw std::runtime_error("boom");
    }
  };
  default_registry().add("always_fails", [](const EstimatorOptions&) { return std::make_unique<Failing>(); });
  Scenario s = small_scenario();
  s.estimators = {"always_fails"};
  RunOptions opt;
  opt.threads = 3;
  try {
    run_scenario(s, opt);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "replication 0 at grid point 0 failed (seed 42): boom");
  }
}

TEST(Harness, CsvLayouts) {
  Scenario s = small_scenario();
  s.reps = 4;
  const auto m = run_scenario(s);
  std::ostringstream metrics, plot;
  write_metrics_csv(m, metrics);
  write_plot_data_csv(m, plot);
  const auto rows = parse_delimited(metrics.str(), "metrics");
  EXPECT_EQ(rows[0].cells,
            (std::vector<std::string>{"scenario_id", "estimator", "x_axis_value", "metric_name", "value", "mc_se",
                                      "reps", "seed"}));
  // Per grid point: 2 estimators x 6 metrics + bonferroni x 3.
  EXPECT_EQ(rows.size(), 1u + 2u * 15u);
  const auto wide = parse_delimited(plot.str(), "plot");
  ASSERT_EQ(wide.size(), 3u);
  EXPECT_EQ(wide[0].cells.back(), "coverage_lower_bar");
  EXPECT_EQ(wide[0].cells[2], "ln_risk_L1_nebv");
  double bar = 0.0;
  ASSERT_TRUE(parse_double_cell(wide[1].cells.back(), bar));
  EXPECT_NEAR(bar, 0.95 - 1.96 * std::sqrt(0.95 * 0.05 / 4), 1e-9);
}
