#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace nebv::detail {

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> args) {
  if (args.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(args.begin(), args.end());
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - hi);
  return hi + std::log(sum);
}

}  // namespace nebv::detail
