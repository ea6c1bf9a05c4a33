#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nebv/prior.hpp"
#include "nebv/random.hpp"
#include "nebv/selection.hpp"

namespace nebv {

/// Features x subjects matrix with a two-group labelling of the subjects.
struct ExpressionData {
  Eigen::MatrixXd values;  // rows = features, columns = subjects
  std::vector<std::string> feature_ids;
  std::vector<std::string> subject_ids;
  std::vector<int> group;  // 0 or 1 per subject
  std::array<std::string, 2> group_names;
  std::size_t dropped_features = 0;  // rows removed for missing values

  std::size_t features() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t subjects() const noexcept { return static_cast<std::size_t>(values.cols()); }
  std::size_t group_size(int g) const;
  /// Throws std::invalid_argument unless the shapes agree and each group has >= 2 subjects.
  void validate() const;
};

/// Where the group labels live: a row of the matrix file whose first cell is
/// `label_row`, or a sidecar file of (subject_id, label) rows.
struct LabelSpec {
  std::string label_row = "label";
  std::optional<std::string> sidecar_path;
};

/// Reads a CSV/TSV whose header row holds subject ids (after one feature-id
/// column) and whose other rows are features. Rows containing NA, NaN or empty
/// cells are dropped and counted.
ExpressionData load_expression_matrix(const std::string& path, const LabelSpec& labels = {});
ExpressionData parse_expression_matrix(const std::string& text, const std::string& source,
                                       const LabelSpec& labels = {},
                                       const std::optional<std::string>& sidecar_text = {});

/// Subject indices of the two halves of a stratified split.
struct SplitHalves {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Shuffles each group and deals the first ceil(n/2) members to the first
/// half. Needs >= 4 subjects per group.
SplitHalves split_indices(const ExpressionData& data, Rng& rng);
std::pair<ExpressionData, ExpressionData> split_half(const ExpressionData& data, Rng& rng);
ExpressionData subset_subjects(const ExpressionData& data, const std::vector<std::size_t>& columns);

/// Per-feature two-sample reduction: X = mean(group 0) - mean(group 1),
/// pooled S^2 with k = n0 + n1 - 2, and Var(X) = sigma^2 (1/n0 + 1/n1).
struct TwoSampleStats {
  std::vector<double> x;
  std::vector<double> s2;
  int k = 0;
  double observation_scale = 0.0;
};
TwoSampleStats two_sample_stats(const ExpressionData& data, const std::vector<std::size_t>& columns);

/// Per-feature significance (interval excludes zero) for one method on one
/// data half. Features with zero pooled variance are never significant and
/// are left out of variance and hyperparameter estimation.
std::vector<bool> significant_features(const TwoSampleStats& stats, const std::string& method, std::size_t b,
                                       double gamma, double gamma_star, MeanWeighting weighting);

struct DiscordanceConfig {
  std::vector<std::string> methods{"sample_variance", "nebv"};
  std::size_t reps = 1000;
  double gamma = 0.05;
  double gamma_star = 0.05;
  std::size_t b = 5;
  MeanWeighting weighting = MeanWeighting::kPrecision;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct DiscordanceRecord {
  std::size_t replication = 0;
  std::string method;
  double discordance = 0.0;   // significant in the first half, not in the second
  double symmetric = 0.0;     // average of both directions
  double significant_first = 0.0;
  double significant_second = 0.0;
};

struct DiscordanceRow {
  std::string method;
  double mean = 0.0;
  double median = 0.0;
  double mean_symmetric = 0.0;
  std::size_t reps = 0;
};

struct DiscordanceSummary {
  std::vector<DiscordanceRow> rows;
  std::vector<DiscordanceRecord> records;  // replication-major
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t features = 0;
  std::size_t dropped_features = 0;

  const DiscordanceRow& row(const std::string& method) const;
};

/// Repeats stratified split-half analyses and measures, per method, the
/// fraction of features declared significant on the first half but not on the
/// second. Every method sees the same splits.
DiscordanceSummary discordance_rate(const ExpressionData& data, const DiscordanceConfig& config);

/// Columns: method, mean, median, mean_symmetric, reps, seed.
void write_discordance_summary_csv(const DiscordanceSummary& summary, std::ostream& out);
/// Columns: replication, method, discordance, symmetric, significant_first, significant_second.
void write_discordance_detail_csv(const DiscordanceSummary& summary, std::ostream& out);

/// Two-group data with per-feature variances from `prior`. A fraction
/// `nonnull_fraction` of features get a group-1 shift drawn from N(0, effect_var).
struct SyntheticExpressionSpec {
  std::size_t features = 2000;
  std::size_t first_group = 22;
  std::size_t second_group = 40;
  PriorSpec prior = PriorSpec::inverse_gamma(3.0, 1.0);
  double nonnull_fraction = 0.2;
  double effect_var = 1.0;
  std::uint64_t seed = 0;
};
ExpressionData make_synthetic_expression(const SyntheticExpressionSpec& spec);

}  // namespace nebv
