#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "nebv/random.hpp"

namespace nebv {

struct IdentityCorrelation {};

/// rho_ij = rho for 0 < |i-j| <= d, 0 beyond the band.
struct BandedCorrelation {
  int d;
  double rho;
};

/// rho_ij = rho^{|i-j|}.
struct ArCorrelation {
  double rho;
};

/// R = B^{-1/2} A'A B^{-1/2}, with A a p x p matrix holding `density * p^2`
/// uniform(a, b) entries at random positions and zeros elsewhere, and
/// B = diag(A'A).
struct SparseCorrelation {
  double a;
  double b;
  double density = 0.015;
};

/// Sample correlation of `subset_size` randomly chosen columns of a numeric
/// matrix on disk (rows = observations, columns = variables).
struct FileCorrelation {
  std::string path;
  std::size_t subset_size;
};

using CorrelationSpec = std::variant<IdentityCorrelation, BandedCorrelation, ArCorrelation,
                                     SparseCorrelation, FileCorrelation>;

/// "identity", "banded(d,rho)", "ar(rho)", "sparse(a,b[,density])", "file(path,size)".
CorrelationSpec parse_correlation(std::string_view text);
std::string to_string(const CorrelationSpec& spec);

/// p x p correlation matrix for the spec, checked symmetric with unit diagonal
/// and made positive definite (see factor_correlation). `rng` is used only by
/// the randomised constructions.
Eigen::MatrixXd build_correlation(const CorrelationSpec& spec, std::size_t p, Rng& rng);

struct CorrelationFactor {
  Eigen::MatrixXd lower;  // R = lower * lower^T
  double jitter = 0.0;    // epsilon added to the diagonal before renormalising
};

/// Cholesky factor of R. If R is numerically indefinite, eps*I is added with
/// eps doubling from 1e-10 up to 1e-6 and the result rescaled to unit
/// diagonal; beyond that a std::runtime_error is thrown.
CorrelationFactor factor_correlation(const Eigen::MatrixXd& r);

/// Fraction of exactly-zero off-diagonal entries.
double off_diagonal_zero_fraction(const Eigen::MatrixXd& r);

/// Numeric matrix from a delimited file; a non-numeric first row is a header.
Eigen::MatrixXd read_numeric_matrix(const std::string& path);

}  // namespace nebv
