#include "nebv/discordance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nebv/csv.hpp"
#include "nebv/estimators.hpp"
#include "nebv/types.hpp"
#include "parallel.hpp"

namespace nebv {

namespace {

bool is_missing(const std::string& cell) {
  static const char* const tokens[] = {"", "NA", "na", "N/A", "NaN", "nan", "NAN", "NULL", "null", "."};
  return std::find(std::begin(tokens), std::end(tokens), cell) != std::end(tokens);
}

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::size_t ExpressionData::group_size(int g) const {
  return static_cast<std::size_t>(std::count(group.begin(), group.end(), g));
}

void ExpressionData::validate() const {
  if (group.size() != subjects()) throw std::invalid_argument("expression data: one label per subject required");
  if (feature_ids.size() != features()) throw std::invalid_argument("expression data: one id per feature required");
  for (int g : group) {
    if (g != 0 && g != 1) throw std::invalid_argument("expression data: group labels must be 0 or 1");
  }
  for (int g = 0; g < 2; ++g) {
    if (group_size(g) < 2) {
      throw std::invalid_argument("expression data: group '" + group_names[static_cast<std::size_t>(g)] +
                                  "' has fewer than 2 subjects");
    }
  }
}

ExpressionData parse_expression_matrix(const std::string& text, const std::string& source,
                                       const LabelSpec& labels, const std::optional<std::string>& sidecar_text) {
  const auto rows = parse_delimited(text, source);
  if (rows.empty()) throw ParseError(source, 1, "empty file");
  const auto& header = rows.front();
  if (header.cells.size() < 2) throw ParseError(source, header.line, "header needs a feature column and subject ids");
  const std::size_t n = header.cells.size() - 1;

  ExpressionData data;
  data.subject_ids.assign(header.cells.begin() + 1, header.cells.end());
  std::vector<std::string> label_of;
  std::vector<std::vector<double>> kept;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != n + 1) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(n + 1) + " cells, found " + std::to_string(row.cells.size()));
    }
    if (row.cells[0] == labels.label_row) {
      if (sidecar_text) throw ParseError(source, row.line, "labels given both inline and in a sidecar file");
      if (!label_of.empty()) throw ParseError(source, row.line, "duplicate label row");
      label_of.assign(row.cells.begin() + 1, row.cells.end());
      continue;
    }
    std::vector<double> values(n);
    bool missing = false;
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& cell = row.cells[j + 1];
      if (is_missing(cell)) {
        missing = true;
        continue;
      }
      if (!parse_double_cell(cell, values[j])) {
        throw ParseError(source, row.line, "non-numeric value '" + cell + "'", j + 2);
      }
      if (std::isnan(values[j])) missing = true;
    }
    if (missing) {
      ++data.dropped_features;
      continue;
    }
    data.feature_ids.push_back(row.cells[0]);
    kept.push_back(std::move(values));
  }

  if (sidecar_text) {
    const std::string sidecar_source = labels.sidecar_path.value_or("<labels>");
    std::map<std::string, std::string> by_subject;
    const auto label_rows = parse_delimited(*sidecar_text, sidecar_source);
    for (std::size_t r = 0; r < label_rows.size(); ++r) {
      const auto& row = label_rows[r];
      if (row.cells.size() != 2) throw ParseError(sidecar_source, row.line, "expected 'subject,label'");
      const bool known = std::find(data.subject_ids.begin(), data.subject_ids.end(), row.cells[0]) !=
                         data.subject_ids.end();
      if (!known) {
        if (r == 0) continue;  // header
        throw ParseError(sidecar_source, row.line, "unknown subject '" + row.cells[0] + "'");
      }
      if (!by_subject.emplace(row.cells[0], row.cells[1]).second) {
        throw ParseError(sidecar_source, row.line, "subject '" + row.cells[0] + "' labelled twice");
      }
    }
    for (const auto& id : data.subject_ids) {
      const auto it = by_subject.find(id);
      if (it == by_subject.end()) throw std::invalid_argument(sidecar_source + ": no label for subject '" + id + "'");
      label_of.push_back(it->second);
    }
  }
  if (label_of.empty()) {
    throw std::invalid_argument(source + ": no label row '" + labels.label_row + "' and no sidecar label file");
  }

  std::vector<std::string> names;
  for (const auto& l : label_of) {
    if (std::find(names.begin(), names.end(), l) == names.end()) names.push_back(l);
  }
  if (names.size() != 2) {
    throw std::invalid_argument(source + ": expected exactly 2 groups, found " + std::to_string(names.size()));
  }
  data.group_names = {names[0], names[1]};
  for (const auto& l : label_of) data.group.push_back(l == names[0] ? 0 : 1);

  data.values.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kept[i][j];
  }
  if (kept.empty()) throw std::invalid_argument(source + ": no complete feature rows");
  data.validate();
  return data;
}

ExpressionData load_expression_matrix(const std::string& path, const LabelSpec& labels) {
  const std::string text = slurp(path, "expression matrix");
  std::optional<std::string> sidecar;
  if (labels.sidecar_path) sidecar = slurp(*labels.sidecar_path, "label file");
  return parse_expression_matrix(text, path, labels, sidecar);
}

SplitHalves split_indices(const ExpressionData& data, Rng& rng) {
  SplitHalves halves;
  for (int g = 0; g < 2; ++g) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < data.group.size(); ++j) {
      if (data.group[j] == g) members.push_back(j);
    }
    if (members.size() < 4) {
      throw std::invalid_argument("split: group '" + data.group_names[static_cast<std::size_t>(g)] + "' has " +
                                  std::to_string(members.size()) + " subjects, need at least 4");
    }
    for (std::size_t i = members.size() - 1; i > 0; --i) std::swap(members[i], members[rng.below(i + 1)]);
    const std::size_t cut = (members.size() + 1) / 2;
    halves.first.insert(halves.first.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(cut));
    halves.second.insert(halves.second.end(), members.begin() + static_cast<std::ptrdiff_t>(cut), members.end());
  }
  std::sort(halves.first.begin(), halves.first.end());
  std::sort(halves.second.begin(), halves.second.end());
  return halves;
}

ExpressionData subset_subjects(const ExpressionData& data, const std::vector<std::size_t>& columns) {
  ExpressionData out;
  out.values.resize(data.values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = data.values.col(static_cast<Eigen::Index>(columns[j]));
    out.subject_ids.push_back(data.subject_ids.empty() ? std::to_string(columns[j]) : data.subject_ids[columns[j]]);
    out.group.push_back(data.group[columns[j]]);
  }
  out.feature_ids = data.feature_ids;
  out.group_names = data.group_names;
  out.dropped_features = data.dropped_features;
  return out;
}

std::pair<ExpressionData, ExpressionData> split_half(const ExpressionData& data, Rng& rng) {
  const SplitHalves h = split_indices(data, rng);
  return {subset_subjects(data, h.first), subset_subjects(data, h.second)};
}

TwoSampleStats two_sample_stats(const ExpressionData& data, const std::vector<std::size_t>& columns) {
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t c : columns) members[static_cast<std::size_t>(data.group.at(c))].push_back(c);
  const double n0 = static_cast<double>(members[0].size());
  const double n1 = static_cast<double>(members[1].size());
  if (n0 < 1 || n1 < 1 || n0 + n1 < 3) throw std::invalid_argument("two-sample statistics: groups too small");

  TwoSampleStats out;
  out.k = static_cast<int>(n0 + n1) - 2;
  out.observation_scale = 1.0 / n0 + 1.0 / n1;
  const std::size_t p = data.features();
  out.x.resize(p);
  out.s2.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto row = data.values.row(static_cast<Eigen::Index>(i));
    std::array<double, 2> mean{0.0, 0.0};
    for (int g = 0; g < 2; ++g) {
      for (std::size_t c : members[static_cast<std::size_t>(g)]) mean[static_cast<std::size_t>(g)] += row(static_cast<Eigen::Index>(c));
      mean[static_cast<std::size_t>(g)] /= static_cast<double>(members[static_cast<std::size_t>(g)].size());
    }
    double ss = 0.0;
    for (int g = 0; g < 2; ++g) {
      for (std::size_t c : members[static_cast<std::size_t>(g)]) {
        const double d = row(static_cast<Eigen::Index>(c)) - mean[static_cast<std::size_t>(g)];
        ss += d * d;
      }
    }
    out.x[i] = mean[0] - mean[1];
    out.s2[i] = ss / static_cast<double>(out.k);
  }
  return out;
}

std::vector<bool> significant_features(const TwoSampleStats& stats, const std::string& method, std::size_t b,
                                       double gamma, double gamma_star, MeanWeighting weighting) {
  const std::size_t p = stats.x.size();
  std::vector<bool> sig(p, false);
  std::vector<std::size_t> live;
  std::vector<double> x, s2;
  for (std::size_t i = 0; i < p; ++i) {
    if (stats.s2[i] > 0.0) {
      live.push_back(i);
      x.push_back(stats.x[i]);
      s2.push_back(stats.s2[i]);
    }
  }
  if (live.empty()) return sig;

  const auto estimator = default_registry().make(method, EstimatorOptions{b});
  const std::vector<double> sigma2 = estimator->estimate(s2, DegreesOfFreedom(stats.k));
  std::vector<double> v(live.size());
  for (std::size_t j = 0; j < live.size(); ++j) v[j] = sigma2[j] * stats.observation_scale;
  const HyperParams hyper = estimate_hyperparams(x, v, gamma_star, weighting);
  for (std::size_t j = 0; j < live.size(); ++j) {
    if (!(v[j] > 0.0)) continue;
    sig[live[j]] = !eb_interval(x[j], v[j], hyper, gamma).contains(0.0);
  }
  return sig;
}

const DiscordanceRow& DiscordanceSummary::row(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method) return r;
  }
  throw std::out_of_range("no discordance row for method '" + method + "'");
}

DiscordanceSummary discordance_rate(const ExpressionData& data, const DiscordanceConfig& cfg) {
  data.validate();
  if (cfg.reps < 1) throw std::invalid_argument("discordance: reps must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("discordance: no methods");
  for (const auto& m : cfg.methods) default_registry().make(m, EstimatorOptions{cfg.b});  // validates the name
  const std::size_t n_methods = cfg.methods.size();
  const double p = static_cast<double>(data.features());

  std::vector<DiscordanceRecord> records(cfg.reps * n_methods);
  auto task = [&](std::size_t r) {
    Rng rng(cfg.seed, r, Stream::kSplit);
    const SplitHalves halves = split_indices(data, rng);
    const TwoSampleStats first = two_sample_stats(data, halves.first);
    const TwoSampleStats second = two_sample_stats(data, halves.second);
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto sig1 = significant_features(first, cfg.methods[m], cfg.b, cfg.gamma, cfg.gamma_star, cfg.weighting);
      const auto sig2 = significant_features(second, cfg.methods[m], cfg.b, cfg.gamma, cfg.gamma_star, cfg.weighting);
      std::size_t forward = 0, backward = 0, count1 = 0, count2 = 0;
      for (std::size_t i = 0; i < sig1.size(); ++i) {
        forward += sig1[i] && !sig2[i];
        backward += sig2[i] && !sig1[i];
        count1 += sig1[i];
        count2 += sig2[i];
      }
      DiscordanceRecord& rec = records[r * n_methods + m];
      rec.replication = r;
      rec.method = cfg.methods[m];
      rec.discordance = static_cast<double>(forward) / p;
      rec.symmetric = 0.5 * static_cast<double>(forward + backward) / p;
      rec.significant_first = static_cast<double>(count1) / p;
      rec.significant_second = static_cast<double>(count2) / p;
    }
  };
  detail::parallel_for(cfg.reps, cfg.threads, task, [&](std::size_t r, std::exception_ptr e) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      what = ex.what();
    } catch (...) {
    }
    throw std::runtime_error("discordance repetition " + std::to_string(r) + " failed (seed " +
                             std::to_string(cfg.seed) + "): " + what);
  });

  DiscordanceSummary summary;
  summary.reps = cfg.reps;
  summary.seed = cfg.seed;
  summary.features = data.features();
  summary.dropped_features = data.dropped_features;
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::vector<double> values;
    double sum = 0.0, sym = 0.0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const auto& rec = records[r * n_methods + m];
      values.push_back(rec.discordance);
      sum += rec.discordance;
      sym += rec.symmetric;
    }
    const double n = static_cast<double>(cfg.reps);
    summary.rows.push_back({cfg.methods[m], sum / n, median_of(values), sym / n, cfg.reps});
  }
  summary.records = std::move(records);
  return summary;
}

void write_discordance_summary_csv(const DiscordanceSummary& summary, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"method", "mean", "median", "mean_symmetric", "reps", "seed"});
  for (const auto& row : summary.rows) {
    csv.field(row.method).field(row.mean).field(row.median).field(row.mean_symmetric).field(row.reps);
    csv.field(std::to_string(summary.seed));
    csv.end_row();
  }
}

void write_discordance_detail_csv(const DiscordanceSummary& summary, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"replication", "method", "discordance", "symmetric", "significant_first", "significant_second"});
  for (const auto& rec : summary.records) {
    csv.field(rec.replication)
        .field(rec.method)
        .field(rec.discordance)
        .field(rec.symmetric)
        .field(rec.significant_first)
        .field(rec.significant_second);
    csv.end_row();
  }
}

ExpressionData make_synthetic_expression(const SyntheticExpressionSpec& spec) {
  if (spec.features < 1) throw std::invalid_argument("synthetic expression: need at least one feature");
  if (!(spec.nonnull_fraction >= 0.0 && spec.nonnull_fraction <= 1.0)) {
    throw std::invalid_argument("synthetic expression: nonnull_fraction must lie in [0, 1]");
  }
  if (!(spec.effect_var >= 0.0)) throw std::invalid_argument("synthetic expression: effect_var must be >= 0");
  const std::size_t n = spec.first_group + spec.second_group;
  Rng rng(spec.seed, 0, Stream::kSynthetic);

  ExpressionData data;
  data.values.resize(static_cast<Eigen::Index>(spec.features), static_cast<Eigen::Index>(n));
  data.group_names = {"A", "B"};
  for (std::size_t j = 0; j < n; ++j) {
    data.subject_ids.push_back("s" + std::to_string(j + 1));
    data.group.push_back(j < spec.first_group ? 0 : 1);
  }
  const double effect_sd = std::sqrt(spec.effect_var);
  for (std::size_t i = 0; i < spec.features; ++i) {
    data.feature_ids.push_back("f" + std::to_string(i + 1));
    const double sd = std::sqrt(draw_prior(spec.prior, rng));
    const double shift = rng.uniform() < spec.nonnull_fraction ? effect_sd * rng.normal() : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double mean = j < spec.first_group ? 0.0 : shift;
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mean + sd * rng.normal();
    }
  }
  data.validate();
  return data;
}

}  // namespace nebv
