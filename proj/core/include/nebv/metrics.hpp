#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace nebv {

enum class Loss {
  kL1,  // (sigma^2 / sigma_hat^2 - 1)^2
  kL2,  // (sigma_hat^2 / sigma^2 - 1)^2
  kL3,  // Stein: r - ln r - 1 with r = sigma_hat^2 / sigma^2
};

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view name);

/// Loss for one coordinate. A zero estimate yields +inf under L1 and L3.
double loss_term(double estimate, double truth, Loss loss);

/// Sum of loss_term over the selected indices.
double loss_metrics(std::span<const double> estimates, std::span<const double> truth,
                    std::span<const std::size_t> selection, Loss loss);

}  // namespace nebv
