#include "nebv/harness.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "nebv/csv.hpp"
#include "nebv/estimators.hpp"
#include "nebv/metrics.hpp"
#include "nebv/selection.hpp"
#include "parallel.hpp"

namespace nebv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Sample mean and its standard error; an infinite term makes both infinite.
Estimate mean_with_se(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) {
    if (std::isinf(v)) return {v, std::numeric_limits<double>::infinity()};
    sum += v;
  }
  const double mean = sum / n;
  if (values.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

const MethodMetrics& MetricsSummary::at(std::size_t grid_index, const std::string& method) const {
  for (const auto& row : rows) {
    if (row.grid_index == grid_index && row.method == method) return row;
  }
  throw std::out_of_range("no metrics for method '" + method + "' at grid point " + std::to_string(grid_index));
}

MetricsSummary run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const DatasetGenerator generator(scenario);

  std::vector<std::unique_ptr<VarianceEstimator>> estimators;
  for (const auto& name : scenario.estimators) {
    estimators.push_back(default_registry().make(name, EstimatorOptions{scenario.b}));
  }

  MetricsSummary summary;
  summary.scenario_id = scenario.id;
  summary.seed = scenario.seed;
  summary.reps = scenario.reps;
  summary.gamma = scenario.gamma;
  summary.methods = scenario.estimators;
  summary.methods.push_back(kBonferroniName);
  summary.grid = scenario.grid();
  summary.correlation_jitter = generator.jitter();

  const std::size_t n_methods = summary.methods.size();
  const std::size_t n_tasks = summary.grid.size() * scenario.reps;
  std::vector<ReplicationRecord> records(n_tasks * n_methods);

  PipelineOptions pipeline;
  pipeline.gamma = scenario.gamma;
  pipeline.gamma_star = scenario.gamma_star;
  pipeline.weighting = scenario.weighting;
  pipeline.observation_scale = scenario.observation_scale();

  auto task = [&](std::size_t t) {
    const std::size_t g = t / scenario.reps;
    const std::size_t r = t % scenario.reps;
    const Dataset data = generator.generate(summary.grid[g].tau2, r);
    const SelectionResult sel = select_top(data.sample);
    const double truth = data.sigma2[sel.index];
    const double theta = data.theta[sel.index];
    const Interval bonf = bonferroni_t_interval(sel.x_selected, sel.s2_selected * data.observation_scale,
                                                scenario.k, scenario.p, scenario.gamma);

    ReplicationRecord* out = &records[t * n_methods];
    for (std::size_t m = 0; m < n_methods; ++m) {
      ReplicationRecord& rec = out[m];
      rec.grid_index = g;
      rec.replication = r;
      rec.method = m;
      rec.selected = sel.index;
      rec.sigma2_true = truth;
      rec.theta = theta;
      Interval iv = bonf;
      if (m < estimators.size()) {
        const PipelineResult res = selected_interval_pipeline(data.sample, *estimators[m], pipeline);
        iv = res.interval;
        rec.sigma2_hat = res.sigma2_hat[sel.index];
        rec.loss_l1 = loss_term(rec.sigma2_hat, truth, Loss::kL1);
        rec.loss_l2 = loss_term(rec.sigma2_hat, truth, Loss::kL2);
        rec.loss_l3 = loss_term(rec.sigma2_hat, truth, Loss::kL3);
      } else {
        rec.sigma2_hat = sel.s2_selected;
        rec.loss_l1 = rec.loss_l2 = rec.loss_l3 = kNaN;
      }
      rec.lower = iv.lower;
      rec.upper = iv.upper;
      rec.covered = iv.contains(theta);
      rec.length_ratio = iv.length() / bonf.length();
    }
  };

  detail::parallel_for(n_tasks, options.threads, task, [&](std::size_t t, std::exception_ptr e) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      what = ex.what();
    } catch (...) {
    }
    throw std::runtime_error("replication " + std::to_string(t % scenario.reps) + " at grid point " +
                             std::to_string(t / scenario.reps) + " failed (seed " +
                             std::to_string(scenario.seed) + "): " + what);
  });

  for (std::size_t g = 0; g < summary.grid.size(); ++g) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<double> l1, l2, l3, ratio;
      double covered = 0.0;
      for (std::size_t r = 0; r < scenario.reps; ++r) {
        const ReplicationRecord& rec = records[(g * scenario.reps + r) * n_methods + m];
        l1.push_back(rec.loss_l1);
        l2.push_back(rec.loss_l2);
        l3.push_back(rec.loss_l3);
        ratio.push_back(rec.length_ratio);
        covered += rec.covered ? 1.0 : 0.0;
      }
      MethodMetrics row;
      row.method = summary.methods[m];
      row.grid_index = g;
      row.x_axis = summary.grid[g].x_axis;
      row.tau2 = summary.grid[g].tau2;
      row.reps = scenario.reps;
      const double n = static_cast<double>(scenario.reps);
      const double c = covered / n;
      row.coverage = {c, std::sqrt(c * (1.0 - c) / n)};
      row.length_ratio = mean_with_se(ratio);
      if (m < estimators.size()) {
        row.risk_l1 = mean_with_se(l1);
        row.risk_l2 = mean_with_se(l2);
        row.risk_l3 = mean_with_se(l3);
      } else {
        row.risk_l1 = row.risk_l2 = row.risk_l3 = {kNaN, kNaN};
      }
      summary.rows.push_back(std::move(row));
    }
  }
  if (options.keep_records) summary.records = std::move(records);
  return summary;
}

void write_metrics_csv(const MetricsSummary& summary, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"scenario_id", "estimator", "x_axis_value", "metric_name", "value", "mc_se", "reps", "seed"});
  auto emit = [&](const MethodMetrics& row, const char* metric, const Estimate& e) {
    csv.field(summary.scenario_id)
        .field(row.method)
        .field(row.x_axis)
        .field(metric)
        .field(e.value)
        .field(e.mc_se)
        .field(row.reps)
        .field(std::to_string(summary.seed));
    csv.end_row();
  };
  for (const auto& row : summary.rows) {
    emit(row, "tau2", {row.tau2, 0.0});
    if (row.method != kBonferroniName) {
      emit(row, "risk_L1", row.risk_l1);
      emit(row, "risk_L2", row.risk_l2);
      emit(row, "risk_L3", row.risk_l3);
    }
    emit(row, "coverage", row.coverage);
    emit(row, "length_ratio", row.length_ratio);
  }
}

void write_plot_data_csv(const MetricsSummary& summary, std::ostream& out) {
  CsvWriter csv(out);
  std::vector<std::string> header{"x_axis_value", "tau2"};
  for (const auto& m : summary.methods) {
    if (m != kBonferroniName) {
      header.push_back("ln_risk_L1_" + m);
      header.push_back("ln_risk_L2_" + m);
      header.push_back("ln_risk_L3_" + m);
    }
  }
  for (const auto& m : summary.methods) header.push_back("coverage_" + m);
  for (const auto& m : summary.methods) header.push_back("length_ratio_" + m);
  header.push_back("coverage_lower_bar");
  csv.row(header);

  const double level = 1.0 - summary.gamma;
  const double bar = level - 1.96 * std::sqrt(level * (1.0 - level) / static_cast<double>(summary.reps));
  for (std::size_t g = 0; g < summary.grid.size(); ++g) {
    csv.field(summary.grid[g].x_axis).field(summary.grid[g].tau2);
    for (const auto& m : summary.methods) {
      if (m == kBonferroniName) continue;
      const auto& row = summary.at(g, m);
      csv.field(std::log(row.risk_l1.value)).field(std::log(row.risk_l2.value)).field(std::log(row.risk_l3.value));
    }
    for (const auto& m : summary.methods) csv.field(summary.at(g, m).coverage.value);
    for (const auto& m : summary.methods) csv.field(summary.at(g, m).length_ratio.value);
    csv.field(bar);
    csv.end_row();
  }
}

void write_replications_csv(const MetricsSummary& summary, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"x_axis_value", "replication", "estimator", "selected_index", "sigma2_hat", "sigma2_true", "theta",
           "lower", "upper", "covered", "length_ratio", "loss_L1", "loss_L2", "loss_L3"});
  for (const auto& rec : summary.records) {
    csv.field(summary.grid[rec.grid_index].x_axis)
        .field(rec.replication)
        .field(summary.methods[rec.method])
        .field(rec.selected)
        .field(rec.sigma2_hat)
        .field(rec.sigma2_true)
        .field(rec.theta)
        .field(rec.lower)
        .field(rec.upper)
        .field(rec.covered ? 1 : 0)
        .field(rec.length_ratio)
        .field(rec.loss_l1)
        .field(rec.loss_l2)
        .field(rec.loss_l3);
    csv.end_row();
  }
}

}  // namespace nebv
