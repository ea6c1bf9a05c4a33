#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nebv/random.hpp"

using namespace nebv;

// Known-answer vectors for Philox4x32-10 published with the Random123 suite.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, DeterministicPerSeedReplicationStream) {
  Rng a(42, 7, Stream::kPrior), b(42, 7, Stream::kPrior);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(Rng, StreamsAndReplicationsDiffer) {
  Rng base(42, 7, Stream::kPrior);
  Rng other_stream(42, 7, Stream::kTheta);
  Rng other_rep(42, 8, Stream::kPrior);
  Rng other_seed(43, 7, Stream::kPrior);
  const double x = base.uniform();
  EXPECT_NE(x, other_stream.uniform());
  EXPECT_NE(x, other_rep.uniform());
  EXPECT_NE(x, other_seed.uniform());
}

TEST(Rng, UniformStaysInsideOpenInterval) {
  Rng rng(1, 0, Stream::kTest);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng rng(3, 0, Stream::kTest);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(Rng, NormalMoments) {
  Rng rng(5, 0, Stream::kTest);
  const int n = 400000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(ss / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(ScaledChiSquare, MeanAndVarianceAtMillionDraws) {
  Rng rng(11, 0, Stream::kChiSquare);
  const int n = 1000000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_scaled_chisq(1.0, DegreesOfFreedom(4), rng);
    s += v;
    ss += v * v;
  }
  const double mean = s / n;
  const double var = (ss - n * mean * mean) / (n - 1);
  EXPECT_NEAR(mean, 1.0, 0.01);
  EXPECT_NEAR(var, 0.5, 0.02);
}

TEST(ScaledChiSquare, PositiveDraws) {
  Rng rng(12, 0, Stream::kChiSquare);
  for (int k : {1, 3, 40}) {
    for (int i = 0; i < 10000; ++i) ASSERT_GT(sample_scaled_chisq(10.0, DegreesOfFreedom(k), rng), 0.0);
  }
}

TEST(ScaledChiSquare, ScaleEquivariantUnderSameSeed) {
  Rng a(13, 2, Stream::kChiSquare), b(13, 2, Stream::kChiSquare);
  for (int i = 0; i < 1000; ++i) {
    const double unit = sample_scaled_chisq(1.0, DegreesOfFreedom(6), a);
    const double scaled = sample_scaled_chisq(3.5, DegreesOfFreedom(6), b);
    ASSERT_NEAR(scaled, 3.5 * unit, 1e-12 * scaled);
  }
}

TEST(ScaledChiSquare, RejectsNonPositiveVariance) {
  Rng rng(1, 0, Stream::kTest);
  EXPECT_THROW(sample_scaled_chisq(0.0, DegreesOfFreedom(4), rng), std::invalid_argument);
}
