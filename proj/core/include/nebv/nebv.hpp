#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nebv/types.hpp"

namespace nebv {

/// Log-domain tail sums over the empirical distribution of sample variances.
///
/// For the ascending sample s_(0) <= ... <= s_(p-1), position i stores
///   log_a[i] = log sum_{j >= i} s_(j)^{-(k/2-2)}
///   log_b[i] = log sum_{j >= i} s_(j)^{-(k/2-1)}
/// so any tail {s_j >= u} is a single lower_bound away. Powers like
/// (6e-5)^{-19} overflow a double; their logs do not.
class SuffixTables {
 public:
  SuffixTables(std::span<const double> s2, DegreesOfFreedom k);

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::span<const double> log_a() const noexcept { return log_a_; }
  std::span<const double> log_b() const noexcept { return log_b_; }
  DegreesOfFreedom k() const noexcept { return k_; }
  std::size_t size() const noexcept { return sorted_.size(); }

  /// First sorted position with s >= u; size() when the tail is empty.
  std::size_t tail_begin(double u) const noexcept;

  struct LogTailSums {
    double log_a;
    double log_b;
  };
  /// Tail sums over {s_j >= u}; throws EmptyTailError when the tail is empty.
  LogTailSums tail_sums(double u) const;

  /// (k/2) (sum_{s_j>=u} w_j s_j - u) with w_j proportional to s_j^{-(k/2-1)}.
  /// Requires k >= 3; throws EmptyTailError when no s_j >= u.
  double estimate_at(double u) const;

 private:
  double estimate_at_position(std::size_t pos, double u) const;

  std::vector<double> sorted_;
  std::vector<double> log_a_;
  std::vector<double> log_b_;
  DegreesOfFreedom k_;
};

SuffixTables build_suffix_tables(std::span<const double> s2, DegreesOfFreedom k);

struct VarianceEstimates {
  std::vector<double> values;
  std::vector<bool> protected_flags;  // true for top-b passthrough entries
  std::string method;
  std::size_t b = 0;
};

constexpr std::size_t kDefaultTopB = 5;

/// NEBV for every coordinate. The b largest sample variances (and anything
/// tied with the b-th largest) are returned unchanged; b is capped at p.
VarianceEstimates nebv_estimate(std::span<const double> s2, DegreesOfFreedom k,
                                std::size_t b = kDefaultTopB);

/// NEBV evaluated at an arbitrary point u, as used for a selected coordinate.
double nebv_estimate_at(double u, std::span<const double> s2, DegreesOfFreedom k);

/// Same, falling back to u itself on an empty tail.
double nebv_estimate_at_or_self(double u, const SuffixTables& tables);

}  // namespace nebv
