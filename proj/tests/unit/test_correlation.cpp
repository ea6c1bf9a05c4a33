#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nebv/correlation.hpp"

using namespace nebv;

namespace {

Rng test_rng(std::uint64_t seed = 1) { return Rng(seed, 0, Stream::kCorrelation); }

void expect_correlation_matrix(const Eigen::MatrixXd& r) {
  ASSERT_EQ(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    EXPECT_EQ(r(i, i), 1.0);
    for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(r(i, j), r(j, i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-9);
}

}  // namespace

TEST(Correlation, ArWithZeroRhoIsIdentity) {
  auto rng = test_rng();
  EXPECT_TRUE(build_correlation(ArCorrelation{0.0}, 6, rng).isIdentity(0.0));
}

TEST(Correlation, BandedSmallExample) {
  auto rng = test_rng();
  Eigen::MatrixXd expected(3, 3);
  expected << 1, .5, 0, .5, 1, .5, 0, .5, 1;
  EXPECT_TRUE(build_correlation(BandedCorrelation{1, 0.5}, 3, rng).isApprox(expected, 0.0));
}

TEST(Correlation, ArEntriesArePowers) {
  auto rng = test_rng();
  const auto r = build_correlation(ArCorrelation{0.9}, 8, rng);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(r(i, j), std::pow(0.9, std::abs(i - j)), 1e-14);
  }
  expect_correlation_matrix(r);
}

TEST(Correlation, SimulationBandedSettingsFactorWithoutJitter) {
  for (auto spec : {BandedCorrelation{5, 0.1}, BandedCorrelation{2, 0.4}, BandedCorrelation{1, 0.5}}) {
    auto rng = test_rng();
    const auto r = build_correlation(spec, 1000, rng);
    const auto f = factor_correlation(r);
    EXPECT_EQ(f.jitter, 0.0) << to_string(CorrelationSpec{spec});
    EXPECT_TRUE((f.lower * f.lower.transpose()).isApprox(r, 1e-12));
  }
}

TEST(Correlation, SparseZeroFractionMatchesOccupancyModel) {
  // Off-diagonal (j, l) of A'A is zero iff no row of A has both columns
  // occupied; with occupancy d per cell this has probability (1 - d^2)^p.
  const std::size_t p = 1000;
  const double density = 0.015;
  auto rng = test_rng(5);
  const auto r = build_correlation(SparseCorrelation{0.0, 1.0, density}, p, rng);
  expect_correlation_matrix(r);
  const double expected = std::pow(1.0 - density * density, static_cast<double>(p));
  EXPECT_NEAR(off_diagonal_zero_fraction(r), expected, 0.03);
}

TEST(Correlation, SparseIsDeterministicUnderSeed) {
  auto a = test_rng(9), b = test_rng(9), c = test_rng(10);
  const auto ra = build_correlation(SparseCorrelation{0.0, 1.0, 0.05}, 200, a);
  const auto rb = build_correlation(SparseCorrelation{0.0, 1.0, 0.05}, 200, b);
  const auto rc = build_correlation(SparseCorrelation{0.0, 1.0, 0.05}, 200, c);
  EXPECT_TRUE(ra.isApprox(rb, 0.0));
  EXPECT_FALSE(ra.isApprox(rc, 1e-6));
}

TEST(Correlation, SparseWithEmptyColumnFails) {
  auto rng = test_rng();
  EXPECT_THROW(build_correlation(SparseCorrelation{0.0, 1.0, 1.0 / 2500}, 50, rng), std::runtime_error);
}

TEST(Correlation, SingularPsdMatrixIsJittered) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
  const auto f = factor_correlation(ones);
  EXPECT_GT(f.jitter, 0.0);
  EXPECT_LE(f.jitter, 1e-6);
  const Eigen::MatrixXd back = f.lower * f.lower.transpose();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back(i, i), 1.0, 1e-12);
}

TEST(Correlation, IndefiniteMatrixIsRejected) {
  Eigen::MatrixXd r(3, 3);
  r << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  EXPECT_THROW(factor_correlation(r), std::runtime_error);
}

TEST(Correlation, ParseAndPrint) {
  for (const char* text : {"identity", "banded(2,0.4)", "ar(0.9)", "sparse(0,1,0.015)", "file(x.csv,70)"}) {
    EXPECT_EQ(to_string(parse_correlation(text)), text);
  }
  EXPECT_EQ(to_string(parse_correlation(" AR( 0.5 ) ")), "ar(0.5)");
  EXPECT_THROW(parse_correlation("ar(1.0)"), std::invalid_argument);
  EXPECT_THROW(parse_correlation("banded(0,0.3)"), std::invalid_argument);
  EXPECT_THROW(parse_correlation("banded(1.5,0.3)"), std::invalid_argument);
  EXPECT_THROW(parse_correlation("toeplitz(1)"), std::invalid_argument);
  EXPECT_THROW(parse_correlation("sparse(2,1)"), std::invalid_argument);
}

TEST(Correlation, FromFileSubsetsColumns) {
  const auto dir = std::filesystem::temp_directory_path() / "nebv_corr_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "matrix.csv").string();
  {
    std::ofstream out(path);
    Rng rng(3, 0, Stream::kTest);
    for (int c = 0; c < 20; ++c) out << (c ? "," : "") << "g" << c;
    out << "\n";
    for (int r = 0; r < 40; ++r) {
      const double shared = rng.normal();
      for (int c = 0; c < 20; ++c) out << (c ? "," : "") << shared + rng.normal();
      out << "\n";
    }
  }
  auto rng = test_rng();
  const auto r = build_correlation(FileCorrelation{path, 10}, 10, rng);
  expect_correlation_matrix(r);
  EXPECT_GT(r(0, 1), 0.0);
  auto rng2 = test_rng();
  EXPECT_THROW(build_correlation(FileCorrelation{path, 10}, 12, rng2), std::invalid_argument);
  EXPECT_THROW(build_correlation(FileCorrelation{path, 30}, 30, rng2), std::invalid_argument);
  EXPECT_THROW(build_correlation(FileCorrelation{(dir / "missing.csv").string(), 5}, 5, rng2), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Correlation, NumericMatrixReportsBadCell) {
  const auto path = (std::filesystem::temp_directory_path() / "nebv_bad_matrix.csv").string();
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3,x\n";
  }
  try {
    read_numeric_matrix(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::filesystem::remove(path);
}
