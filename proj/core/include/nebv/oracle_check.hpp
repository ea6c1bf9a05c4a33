#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nebv/bayes_oracle.hpp"
#include "nebv/prior.hpp"
#include "nebv/types.hpp"

namespace nebv {

struct OracleCheckConfig {
  PriorSpec prior = PriorSpec::inverse_gamma(3.0, 1.0);
  DegreesOfFreedom k{4};
  std::vector<std::size_t> p_grid{100, 1000, 10000, 100000};
  std::vector<double> delta_grid{1e-2};
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  // Priors without a closed-form rule are checked at this many rank-spread
  // in-domain points per sample instead of at every point.
  std::size_t max_numeric_points = 512;
  unsigned threads = 1;
  QuadratureConfig quadrature{};
};

/// One sample of size p checked on D^delta.
struct OracleCheckRecord {
  std::size_t p = 0;
  double delta = 0.0;
  std::size_t repeat = 0;
  double domain_upper = 0.0;  // D^delta = (0, domain_upper)
  std::size_t n_in_domain = 0;
  double sup_error = 0.0;     // max |NEBV - Bayes rule| over sampled points in D^delta
  double argmax_s2 = 0.0;
};

struct OracleCheckSummary {
  std::size_t p = 0;
  double delta = 0.0;
  double domain_upper = 0.0;
  double median_sup_error = 0.0;
  double mean_sup_error = 0.0;
  double max_sup_error = 0.0;
  std::size_t repeats = 0;
};

struct OracleCheckReport {
  std::vector<OracleCheckRecord> records;
  std::vector<OracleCheckSummary> summary;  // p-major, delta-minor
};

/// For each p, draws `repeats` samples from the marginal of S^2 and measures
/// the sup distance between the untruncated estimator and the Bayes rule over
/// the sample points inside D^delta. All deltas share the same samples, so the
/// errors are nested across deltas. Throws std::invalid_argument when the
/// Bayes rule does not exist for this prior and k.
OracleCheckReport run_oracle_check(const OracleCheckConfig& config);

/// Columns: p, delta, domain_upper, median_sup_error, mean_sup_error, max_sup_error, repeats.
void write_oracle_summary_csv(const OracleCheckReport& report, std::ostream& out);
/// Columns: p, delta, repeat, domain_upper, n_in_domain, sup_error, argmax_s2.
void write_oracle_detail_csv(const OracleCheckReport& report, std::ostream& out);

}  // namespace nebv
