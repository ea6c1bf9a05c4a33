#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nebv/correlation.hpp"
#include "nebv/prior.hpp"
#include "nebv/selection.hpp"
#include "nebv/types.hpp"

namespace nebv {

/// A configuration file violated the schema; `problems()` lists every issue found.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class Design {
  kIndependent,  // one (X_i, S_i^2) pair per coordinate, drawn independently
  kDependent,    // n_rows correlated rows; X = column mean, S^2 = column variance
};

struct GridPoint {
  double x_axis = 0.0;  // tau^2 / (tau^2 + E[observation variance])
  double tau2 = 0.0;
};

struct Scenario {
  std::string id = "scenario";
  std::size_t p = 3000;
  DegreesOfFreedom k{8};
  double mu = 0.0;
  // Exactly one of the two grids is set. An x grid is mapped to tau^2 through
  // tau^2 = x / (1 - x) * E[observation variance].
  std::vector<double> tau2_grid;
  std::vector<double> x_grid;
  PriorSpec prior = PriorSpec::inverse_gamma(3.0, 1.0);
  Design design = Design::kIndependent;
  CorrelationSpec correlation = IdentityCorrelation{};
  std::size_t n_rows = 0;  // dependent design only; must equal k + 1
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  double gamma = 0.05;
  double gamma_star = 0.05;
  std::size_t b = 5;
  std::vector<std::string> estimators{"nebv", "sample_variance"};
  MeanWeighting weighting = MeanWeighting::kPrecision;

  /// Throws ConfigError listing all problems.
  void validate() const;

  /// Multiplier turning a variance of one entry into the variance of X:
  /// 1 for the independent design, 1 / n_rows for the dependent one.
  double observation_scale() const;

  std::vector<GridPoint> grid() const;
};

/// Parses a JSON scenario. `seed_override`, when set, replaces any seed in the
/// file; a scenario without any seed is rejected.
Scenario parse_scenario(const std::string& json_text, std::optional<std::uint64_t> seed_override = {});
Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = {});

/// One simulated data set with its hidden truth.
struct Dataset {
  SampleSet sample;
  std::vector<double> theta;
  std::vector<double> sigma2;
  double observation_scale = 1.0;
};

/// Draws data sets for a scenario. The correlation factor is built once; each
/// (tau^2, replication) pair uses its own random streams, and the streams do
/// not depend on tau^2, so grid points share common random numbers.
class DatasetGenerator {
 public:
  explicit DatasetGenerator(const Scenario& scenario);

  Dataset generate(double tau2, std::uint64_t replication) const;

  /// Diagonal jitter applied while factorising the correlation (0 if none).
  double jitter() const noexcept { return jitter_; }
  const Eigen::MatrixXd& correlation_factor() const noexcept { return factor_; }

 private:
  Dataset generate_independent(double tau2, std::uint64_t replication) const;
  Dataset generate_dependent(double tau2, std::uint64_t replication) const;

  Scenario scenario_;
  Eigen::MatrixXd factor_;  // empty for identity correlation
  double jitter_ = 0.0;
};

Dataset generate_dataset(const Scenario& scenario, double tau2, std::uint64_t replication);

}  // namespace nebv
