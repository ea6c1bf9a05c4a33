#include "nebv/nebv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "log_sum_exp.hpp"

namespace nebv {

SuffixTables::SuffixTables(std::span<const double> s2, DegreesOfFreedom k)
    : sorted_(s2.begin(), s2.end()), k_(k) {
  if (sorted_.empty()) throw std::invalid_argument("suffix tables need at least one sample variance");
  require_positive(sorted_, "sample variances");
  std::sort(sorted_.begin(), sorted_.end());

  const double exp_a = -(k.half() - 2.0);
  const double exp_b = -(k.half() - 1.0);
  const std::size_t p = sorted_.size();
  log_a_.resize(p);
  log_b_.resize(p);
  double acc_a = -std::numeric_limits<double>::infinity();
  double acc_b = acc_a;
  for (std::size_t i = p; i-- > 0;) {
    const double log_s = std::log(sorted_[i]);
    acc_a = detail::log_add_exp(acc_a, exp_a * log_s);
    acc_b = detail::log_add_exp(acc_b, exp_b * log_s);
    log_a_[i] = acc_a;
    log_b_[i] = acc_b;
  }
}

std::size_t SuffixTables::tail_begin(double u) const noexcept {
  return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), u) -
                                  sorted_.begin());
}

SuffixTables::LogTailSums SuffixTables::tail_sums(double u) const {
  const std::size_t pos = tail_begin(u);
  if (pos == sorted_.size()) throw EmptyTailError(u);
  return {log_a_[pos], log_b_[pos]};
}

double SuffixTables::estimate_at_position(std::size_t pos, double u) const {
  const double weighted_mean = std::exp(log_a_[pos] - log_b_[pos]);
  return std::max(0.0, k_.half() * (weighted_mean - u));
}

double SuffixTables::estimate_at(double u) const {
  k_.require_at_least_three("NEBV");
  if (!(u > 0.0)) throw std::invalid_argument("NEBV evaluation point must be positive");
  const std::size_t pos = tail_begin(u);
  if (pos == sorted_.size()) throw EmptyTailError(u);
  return estimate_at_position(pos, u);
}

SuffixTables build_suffix_tables(std::span<const double> s2, DegreesOfFreedom k) {
  return SuffixTables(s2, k);
}

VarianceEstimates nebv_estimate(std::span<const double> s2, DegreesOfFreedom k, std::size_t b) {
  k.require_at_least_three("NEBV");
  if (s2.empty()) throw std::invalid_argument("NEBV needs at least one sample variance");
  b = std::min(b, s2.size());
  const SuffixTables tables(s2, k);
  const auto sorted = tables.sorted();
  const double protect_from = b > 0 ? sorted[sorted.size() - b]
                                    : std::numeric_limits<double>::infinity();

  VarianceEstimates out;
  out.method = "nebv";
  out.b = b;
  out.values.resize(s2.size());
  out.protected_flags.resize(s2.size());
  for (std::size_t i = 0; i < s2.size(); ++i) {
    const double s = s2[i];
    if (s >= protect_from) {
      out.values[i] = s;
      out.protected_flags[i] = true;
    } else {
      out.values[i] = tables.estimate_at(s);
    }
  }
  return out;
}

double nebv_estimate_at(double u, std::span<const double> s2, DegreesOfFreedom k) {
  k.require_at_least_three("NEBV");
  return SuffixTables(s2, k).estimate_at(u);
}

double nebv_estimate_at_or_self(double u, const SuffixTables& tables) {
  try {
    return tables.estimate_at(u);
  } catch (const EmptyTailError&) {
    return u;
  }
}

}  // namespace nebv
