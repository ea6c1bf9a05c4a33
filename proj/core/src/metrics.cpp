#include "nebv/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nebv {

std::string_view to_string(Loss loss) {
  switch (loss) {
    case Loss::kL1: return "L1";
    case Loss::kL2: return "L2";
    case Loss::kL3: return "L3";
  }
  return "?";
}

Loss parse_loss(std::string_view name) {
  if (name == "L1" || name == "l1") return Loss::kL1;
  if (name == "L2" || name == "l2") return Loss::kL2;
  if (name == "L3" || name == "l3" || name == "stein") return Loss::kL3;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "' (valid: L1, L2, L3)");
}

double loss_term(double estimate, double truth, Loss loss) {
  if (!(truth > 0.0)) throw std::invalid_argument("loss: true variance must be > 0");
  if (!(estimate >= 0.0)) throw std::invalid_argument("loss: estimate must be >= 0");
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (loss) {
    case Loss::kL1: {
      if (estimate == 0.0) return inf;
      const double d = truth / estimate - 1.0;
      return d * d;
    }
    case Loss::kL2: {
      const double d = estimate / truth - 1.0;
      return d * d;
    }
    case Loss::kL3: {
      if (estimate == 0.0) return inf;
      const double r = estimate / truth;
      return r - std::log(r) - 1.0;
    }
  }
  return inf;
}

double loss_metrics(std::span<const double> estimates, std::span<const double> truth,
                    std::span<const std::size_t> selection, Loss loss) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("loss: estimates and truth differ in length");
  }
  double total = 0.0;
  for (std::size_t i : selection) {
    if (i >= estimates.size()) throw std::out_of_range("loss: selection index out of range");
    total += loss_term(estimates[i], truth[i], loss);
  }
  return total;
}

}  // namespace nebv
