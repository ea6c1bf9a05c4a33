#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include "nebv/types.hpp"

namespace nebv {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key and the upper three counter words are fixed at
/// construction; the lowest counter word enumerates output blocks. Two
/// engines with distinct (key, c1, c2, c3) produce independent streams, so
/// replications can be drawn in any order or in parallel.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(Key key, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// One application of the 10-round bijection; exposed for known-answer tests.
  static Counter block(Counter counter, Key key) noexcept;

 private:
  Key key_;
  Counter counter_;
  Counter buffer_{};
  unsigned index_ = 4;
};

/// Identifies an independent random stream within one replication.
enum class Stream : std::uint32_t {
  kPrior = 1,
  kTheta = 2,
  kObservation = 3,
  kChiSquare = 4,
  kCorrelation = 5,
  kSplit = 6,
  kOracleSample = 7,
  kSynthetic = 8,
  kTest = 99,
};

/// Seeded generator for one (seed, replication, stream) triple.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t replication, Stream stream);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double a, double b);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma with the given shape and scale (mean shape * scale).
  double gamma(double shape, double scale);
  double chi_square(double k);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// One draw of sigma2 * chi2_k / k.
double sample_scaled_chisq(double sigma2, DegreesOfFreedom k, Rng& rng);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace nebv
