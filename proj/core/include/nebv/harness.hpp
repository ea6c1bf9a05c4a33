#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nebv/scenario.hpp"

namespace nebv {

/// Name used for the Bonferroni t-interval row in summaries.
inline constexpr const char* kBonferroniName = "bonferroni";

struct Estimate {
  double value = 0.0;
  double mc_se = 0.0;
};

/// Outcome of one (grid point, replication, method). Risk fields are NaN for
/// the Bonferroni row, which estimates no variances.
struct ReplicationRecord {
  std::size_t grid_index = 0;
  std::size_t replication = 0;
  std::size_t method = 0;  // index into MetricsSummary::methods
  std::size_t selected = 0;
  double sigma2_hat = 0.0;
  double sigma2_true = 0.0;
  double theta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  double length_ratio = 0.0;
  double loss_l1 = 0.0;
  double loss_l2 = 0.0;
  double loss_l3 = 0.0;
};

struct MethodMetrics {
  std::string method;
  std::size_t grid_index = 0;
  double x_axis = 0.0;
  double tau2 = 0.0;
  Estimate risk_l1, risk_l2, risk_l3;  // NaN for Bonferroni
  Estimate coverage;                   // mc_se = sqrt(c (1 - c) / reps)
  Estimate length_ratio;
  std::size_t reps = 0;
};

struct MetricsSummary {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  double gamma = 0.05;
  std::vector<std::string> methods;  // configured estimators, then "bonferroni"
  std::vector<GridPoint> grid;
  std::vector<MethodMetrics> rows;   // grid-major, method-minor
  std::vector<ReplicationRecord> records;
  double correlation_jitter = 0.0;

  const MethodMetrics& at(std::size_t grid_index, const std::string& method) const;
};

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
  bool keep_records = true;
};

/// Runs every replication at every grid point. Each replication uses streams
/// keyed by (seed, replication), so results do not depend on the thread count
/// or execution order. A failing replication aborts the run with its index and
/// the seed.
MetricsSummary run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Long format: scenario_id, estimator, x_axis_value, metric_name, value, mc_se, reps, seed.
void write_metrics_csv(const MetricsSummary& summary, std::ostream& out);

/// Wide format, one row per grid point: log L1/L2/L3 risk, coverage and length
/// ratio per method, plus the binomial lower error bar for the nominal level.
void write_plot_data_csv(const MetricsSummary& summary, std::ostream& out);

/// Per-replication records.
void write_replications_csv(const MetricsSummary& summary, std::ostream& out);

}  // namespace nebv
