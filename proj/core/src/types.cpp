#include "nebv/types.hpp"

#include <cmath>
#include <sstream>

namespace nebv {

namespace {

std::string empty_tail_message(double u) {
  std::ostringstream os;
  os << "no sample variance at or above u=" << u;
  return os.str();
}

std::string parse_message(const std::string& source, std::size_t line, std::size_t column,
                          const std::string& message) {
  std::ostringstream os;
  os << source << ':' << line;
  if (column > 0) os << ':' << column;
  os << ": " << message;
  return os.str();
}

}  // namespace

EmptyTailError::EmptyTailError(double u) : std::domain_error(empty_tail_message(u)), u_(u) {}

QuadratureError::QuadratureError(const std::string& what, double error_estimate)
    : std::runtime_error(what), error_estimate_(error_estimate) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message,
                       std::size_t column)
    : std::runtime_error(parse_message(source, line, column, message)),
      line_(line),
      column_(column) {}

DegreesOfFreedom::DegreesOfFreedom(int k) : k_(k) {
  if (k < 1) {
    throw std::invalid_argument("degrees of freedom must be >= 1, got " + std::to_string(k));
  }
}

void DegreesOfFreedom::require_at_least_three(std::string_view operation) const {
  if (k_ < 3) {
    throw std::invalid_argument(std::string(operation) + " requires k >= 3, got k=" +
                                std::to_string(k_));
  }
}

SampleSet::SampleSet(std::vector<double> x, std::vector<double> s2, DegreesOfFreedom k)
    : x_(std::move(x)), s2_(std::move(s2)), k_(k) {
  if (x_.empty()) throw std::invalid_argument("SampleSet needs at least one observation");
  if (x_.size() != s2_.size()) {
    throw std::invalid_argument("SampleSet: X and S2 lengths differ (" +
                                std::to_string(x_.size()) + " vs " +
                                std::to_string(s2_.size()) + ")");
  }
  for (double v : x_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampleSet: non-finite X");
  }
  require_positive(s2_, "SampleSet S2");
}

Interval make_interval(double center, double half_width, double level) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("interval half-width must be >= 0");
  return Interval{center, center - half_width, center + half_width, level};
}

void require_positive(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream os;
      os << what << ": entry " << i << " must be positive and finite, got " << values[i];
      throw std::invalid_argument(os.str());
    }
  }
}

void require_probability(double q, std::string_view what) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << what << " must lie in (0,1), got " << q;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace nebv
