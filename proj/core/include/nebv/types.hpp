#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nebv {

/// Raised by tail-sum estimators when no sample variance lies at or above the
/// evaluation point, i.e. the empirical denominator is zero. Callers usually
/// fall back to the evaluation point itself.
class EmptyTailError : public std::domain_error {
 public:
  explicit EmptyTailError(double u);
  double point() const noexcept { return u_; }

 private:
  double u_;
};

/// Raised when adaptive quadrature fails to meet its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate);
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Parse failure with 1-based line (and optional column) context.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message,
             std::size_t column = 0);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Degrees of freedom k of the scaled chi-square model S^2 ~ sigma^2 chi2_k / k.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(int k);

  int value() const noexcept { return k_; }
  double half() const noexcept { return 0.5 * k_; }

  // Tail moments of t^{-(k/2-1)} and t^{-(k/2-2)} under the marginal, and the
  // conjugate oracle, need k >= 3.
  void require_at_least_three(std::string_view operation) const;

  friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

 private:
  int k_;
};

/// Paired observed means and sample variances sharing one k.
class SampleSet {
 public:
  SampleSet(std::vector<double> x, std::vector<double> s2, DegreesOfFreedom k);

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> s2() const noexcept { return s2_; }
  DegreesOfFreedom k() const noexcept { return k_; }
  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> s2_;
  DegreesOfFreedom k_;
};

struct HyperParams {
  double mu = 0.0;
  double tau2 = 0.0;
  double tau0_2 = 0.0;   // truncation floor
  double gamma_star = 0.05;
  bool truncated = false;  // true when tau2 == tau0_2
};

struct Interval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;

  double length() const noexcept { return upper - lower; }
  bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// Interval of half-width `half_width` around `center` at nominal `level`.
Interval make_interval(double center, double half_width, double level);

void require_positive(std::span<const double> values, std::string_view what);
void require_probability(double q, std::string_view what);

}  // namespace nebv
