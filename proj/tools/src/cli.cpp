#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "manifest.hpp"
#include "nebv/csv.hpp"
#include "nebv/discordance.hpp"
#include "nebv/estimators.hpp"
#include "nebv/harness.hpp"
#include "nebv/nebv.hpp"
#include "nebv/oracle_check.hpp"
#include "nebv/scenario.hpp"

#ifndef NEBV_VERSION
#define NEBV_VERSION "unknown"
#endif

namespace nebv::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out_dir = ".";
};

std::uint64_t require_seed(const GlobalOptions& g, const char* command) {
  if (!g.seed) throw UsageError(std::string(command) + " needs --seed (all randomness flows from it)");
  return *g.seed;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " '" + path + "' does not exist");
}

/// Finalises the manifest, stages it and commits every output.
void finish(OutputSet& outputs, RunManifest& manifest, std::ostream& out, std::string manifest_name = {}) {
  if (manifest_name.empty()) manifest_name = manifest.command + ".manifest.json";
  manifest.outputs = outputs.names();
  manifest.outputs.push_back(manifest_name);
  manifest.finished = utc_timestamp();
  outputs.stage(manifest_name, manifest.to_json());
  const auto names = outputs.names();
  outputs.commit();
  for (const auto& n : names) out << "wrote " << n << "\n";
}

RunManifest start_manifest(const std::string& command, const GlobalOptions& g) {
  RunManifest m;
  m.command = command;
  m.seed = g.seed;
  m.version = NEBV_VERSION;
  m.started = utc_timestamp();
  return m;
}

void inline_config(RunManifest& m, const nlohmann::ordered_json& config) {
  m.config_source = "inline";
  m.config_text = config.dump();
  m.config_digest = sha256_hex(m.config_text);
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  int k = 0;
  std::size_t b = kDefaultTopB;
  std::string output = "estimates.csv";
};

struct VarianceTable {
  std::vector<std::string> ids;
  std::vector<double> s2;
};

VarianceTable read_variance_file(const std::string& path) {
  const auto rows = read_delimited(path);
  if (rows.empty()) throw ParseError(path, 1, "no rows");
  std::size_t id_col = 0, s2_col = 1;
  bool has_id = rows.front().cells.size() >= 2;
  std::size_t first = 0;
  double probe = 0.0;
  const auto& head = rows.front().cells;
  if (!has_id) s2_col = 0;
  if (!parse_double_cell(head[s2_col], probe)) {
    // Header row: locate columns by name when possible.
    first = 1;
    for (std::size_t c = 0; c < head.size(); ++c) {
      if (head[c] == "s2" || head[c] == "S2" || head[c] == "sample_variance") s2_col = c;
      if (head[c] == "id") id_col = c;
    }
    has_id = has_id && id_col != s2_col;
  }
  VarianceTable t;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != head.size()) {
      throw ParseError(path, row.line,
                       "expected " + std::to_string(head.size()) + " cells, found " + std::to_string(row.cells.size()));
    }
    double v = 0.0;
    if (!parse_double_cell(row.cells[s2_col], v)) {
      throw ParseError(path, row.line, "sample variance '" + row.cells[s2_col] + "' is not a number", s2_col + 1);
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParseError(path, row.line, "sample variance must be finite and > 0, got '" + row.cells[s2_col] + "'",
                       s2_col + 1);
    }
    t.ids.push_back(has_id ? row.cells[id_col] : std::to_string(t.ids.size() + 1));
    t.s2.push_back(v);
  }
  if (t.s2.empty()) throw ParseError(path, rows.front().line, "no data rows");
  return t;
}

void cmd_estimate(const EstimateArgs& a, const GlobalOptions& g, std::ostream& out) {
  if (a.k < 3) throw UsageError("--k must be >= 3 for the variance estimator, got " + std::to_string(a.k));
  if (a.b < 1) throw UsageError("--b must be >= 1");
  require_file(a.input, "input file");
  RunManifest manifest = start_manifest("estimate", g);
  inline_config(manifest, {{"input", a.input}, {"k", a.k}, {"b", a.b}, {"output", a.output}});
  manifest.inputs.emplace_back(a.input, sha256_file(a.input));

  const VarianceTable table = read_variance_file(a.input);
  const VarianceEstimates est = nebv_estimate(table.s2, DegreesOfFreedom(a.k), a.b);
  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  csv.row({"id", "s2", "sigma2_nebv", "protected"});
  for (std::size_t i = 0; i < table.s2.size(); ++i) {
    csv.field(table.ids[i]).field(table.s2[i]).field(est.values[i]).field(est.protected_flags[i] ? 1 : 0);
    csv.end_row();
  }
  OutputSet outputs(g.out_dir);
  outputs.stage(a.output, csv_text.str());
  finish(outputs, manifest, out);
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  bool replications = false;
};

void cmd_simulate(const SimulateArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::uint64_t seed = require_seed(g, "simulate");
  require_file(a.scenario, "scenario file");
  RunManifest manifest = start_manifest("simulate", g);
  manifest.config_source = a.scenario;
  manifest.config_digest = sha256_file(a.scenario);

  const Scenario scenario = load_scenario(a.scenario, seed);
  const MetricsSummary summary = run_scenario(scenario, RunOptions{g.threads, a.replications});

  OutputSet outputs(g.out_dir);
  std::ostringstream metrics, plot;
  write_metrics_csv(summary, metrics);
  write_plot_data_csv(summary, plot);
  outputs.stage(scenario.id + ".metrics.csv", metrics.str());
  outputs.stage(scenario.id + ".plot_data.csv", plot.str());
  if (a.replications) {
    std::ostringstream reps;
    write_replications_csv(summary, reps);
    outputs.stage(scenario.id + ".replications.csv", reps.str());
  }
  finish(outputs, manifest, out, scenario.id + ".manifest.json");
}

// ---- oracle-check ----------------------------------------------------------

struct OracleArgs {
  std::string prior = "IG(3,1)";
  int k = 4;
  std::vector<std::size_t> p_grid{100, 1000, 10000, 100000};
  std::vector<double> delta_grid{1e-2};
  std::size_t repeats = 20;
};

void cmd_oracle_check(const OracleArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::uint64_t seed = require_seed(g, "oracle-check");
  if (a.k < 3) throw UsageError("--k must be >= 3, got " + std::to_string(a.k));
  OracleCheckConfig cfg;
  try {
    cfg.prior = PriorSpec::parse(a.prior);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--prior: ") + e.what());
  }
  cfg.k = DegreesOfFreedom(a.k);
  cfg.p_grid = a.p_grid;
  cfg.delta_grid = a.delta_grid;
  cfg.repeats = a.repeats;
  cfg.seed = seed;
  cfg.threads = g.threads;

  RunManifest manifest = start_manifest("oracle-check", g);
  inline_config(manifest, {{"prior", cfg.prior.to_string()},
                           {"k", a.k},
                           {"p", a.p_grid},
                           {"delta", a.delta_grid},
                           {"repeats", a.repeats}});
  const OracleCheckReport report = run_oracle_check(cfg);
  std::ostringstream summary, detail;
  write_oracle_summary_csv(report, summary);
  write_oracle_detail_csv(report, detail);
  OutputSet outputs(g.out_dir);
  outputs.stage("oracle_check.csv", summary.str());
  outputs.stage("oracle_check_detail.csv", detail.str());
  finish(outputs, manifest, out);
}

// ---- discordance -----------------------------------------------------------

struct DiscordanceArgs {
  std::string data;
  std::string labels;
  std::string label_row = "label";
  std::vector<std::string> methods{"sample_variance", "nebv"};
  std::size_t reps = 1000;
  double gamma = 0.05;
  double gamma_star = 0.05;
  std::size_t b = kDefaultTopB;
  std::string weighting = "precision";
};

void cmd_discordance(const DiscordanceArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::uint64_t seed = require_seed(g, "discordance");
  require_file(a.data, "data file");
  if (!a.labels.empty()) require_file(a.labels, "label file");
  for (const auto& m : a.methods) {
    if (!default_registry().contains(m)) {
      std::string valid;
      for (const auto& n : default_registry().names()) valid += (valid.empty() ? "" : ", ") + n;
      throw UsageError("unknown method '" + m + "' (valid: " + valid + ")");
    }
  }
  if (a.weighting != "precision" && a.weighting != "unweighted") {
    throw UsageError("--mean-weighting must be 'precision' or 'unweighted'");
  }

  RunManifest manifest = start_manifest("discordance", g);
  inline_config(manifest, {{"data", a.data},
                           {"labels", a.labels},
                           {"label_row", a.label_row},
                           {"methods", a.methods},
                           {"reps", a.reps},
                           {"gamma", a.gamma},
                           {"gamma_star", a.gamma_star},
                           {"b", a.b},
                           {"mean_weighting", a.weighting}});
  manifest.inputs.emplace_back(a.data, sha256_file(a.data));
  if (!a.labels.empty()) manifest.inputs.emplace_back(a.labels, sha256_file(a.labels));

  LabelSpec labels;
  labels.label_row = a.label_row;
  if (!a.labels.empty()) labels.sidecar_path = a.labels;
  const ExpressionData data = load_expression_matrix(a.data, labels);
  if (data.dropped_features > 0) {
    out << "dropped " << data.dropped_features << " feature(s) with missing values\n";
  }

  DiscordanceConfig cfg;
  cfg.methods = a.methods;
  cfg.reps = a.reps;
  cfg.gamma = a.gamma;
  cfg.gamma_star = a.gamma_star;
  cfg.b = a.b;
  cfg.weighting = a.weighting == "precision" ? MeanWeighting::kPrecision : MeanWeighting::kUnweighted;
  cfg.seed = seed;
  cfg.threads = g.threads;
  const DiscordanceSummary summary = discordance_rate(data, cfg);

  std::ostringstream table, detail;
  write_discordance_summary_csv(summary, table);
  write_discordance_detail_csv(summary, detail);
  OutputSet outputs(g.out_dir);
  outputs.stage("discordance_summary.csv", table.str());
  outputs.stage("discordance_detail.csv", detail.str());
  finish(outputs, manifest, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric empirical Bayes variance estimation and post-selection intervals", "nebv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NEBV_VERSION);

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for all randomness")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate variances from a CSV of sample variances");
  estimate->fallthrough();
  estimate->add_option("input", est.input, "CSV with an s2 column (optionally id)")->required();
  estimate->add_option("-k,--k", est.k, "Degrees of freedom of each sample variance")->required();
  estimate->add_option("-b,--b", est.b, "Number of largest sample variances left unshrunk")->capture_default_str();
  estimate->add_option("-o,--output", est.output, "Output file name inside --out-dir")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo scenario file");
  simulate->fallthrough();
  simulate->add_option("scenario", sim.scenario, "Scenario JSON file")->required();
  simulate->add_flag("--replications", sim.replications, "Also write per-replication records");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle-check", "Measure sup-distance to the Bayes rule as p grows");
  oracle->fallthrough();
  oracle->add_option("--prior", orc.prior, "Variance prior, e.g. IG(3,1) or LN(0,0.25)")->capture_default_str();
  oracle->add_option("-k,--k", orc.k, "Degrees of freedom")->capture_default_str();
  oracle->add_option("--p", orc.p_grid, "Sample sizes")->delimiter(',')->capture_default_str();
  oracle->add_option("--delta", orc.delta_grid, "Domain thresholds")->delimiter(',')->capture_default_str();
  oracle->add_option("--repeats", orc.repeats, "Samples per p")->capture_default_str();

  DiscordanceArgs dis;
  auto* discord = app.add_subcommand("discordance", "Split-half discordance on a two-group matrix");
  discord->fallthrough();
  discord->add_option("data", dis.data, "Features x subjects CSV/TSV")->required();
  discord->add_option("--labels", dis.labels, "Sidecar file of subject,label rows");
  discord->add_option("--label-row", dis.label_row, "Name of the inline label row")->capture_default_str();
  discord->add_option("--methods", dis.methods, "Variance estimators")->delimiter(',')->capture_default_str();
  discord->add_option("--reps", dis.reps, "Random splits")->capture_default_str();
  discord->add_option("--gamma", dis.gamma, "1 - interval level")->capture_default_str();
  discord->add_option("--gamma-star", dis.gamma_star, "Truncation level for tau^2")->capture_default_str();
  discord->add_option("-b,--b", dis.b, "Top-b passthrough for nebv")->capture_default_str();
  discord->add_option("--mean-weighting", dis.weighting, "precision or unweighted")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*estimate) cmd_estimate(est, g, out);
    else if (*simulate) cmd_simulate(sim, g, out);
    else if (*oracle) cmd_oracle_check(orc, g, out);
    else if (*discord) cmd_discordance(dis, g, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nebv::cli
