#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nebv/random.hpp"

namespace nebv {

class PriorSpec;

struct InverseGammaPrior {
  double shape;  // alpha
  double scale;  // beta; density proportional to x^{-alpha-1} exp(-beta/x)
};

struct GammaPrior {
  double shape;
  double scale;  // mean = shape * scale
};

/// log(sigma^2) ~ N(mu, tau2).
struct LogNormalPrior {
  double mu;
  double tau2;
};

struct MixturePrior {
  std::vector<double> weights;
  std::vector<PriorSpec> components;
};

struct PointMassPrior {
  double value;
};

/// Prior on the variances sigma_i^2. Parameters are validated on construction,
/// so every PriorSpec in circulation is usable by the samplers and oracles.
class PriorSpec {
 public:
  using Variant =
      std::variant<InverseGammaPrior, GammaPrior, LogNormalPrior, MixturePrior, PointMassPrior>;

  static PriorSpec inverse_gamma(double shape, double scale);
  static PriorSpec gamma(double shape, double scale);
  static PriorSpec log_normal(double mu, double tau2);
  static PriorSpec mixture(std::vector<double> weights, std::vector<PriorSpec> components);
  static PriorSpec point_mass(double value);

  /// Parses the textual form produced by to_string(), e.g. "IG(3,1)",
  /// "Gamma(4,0.0625)", "LN(0,0.25)", "Point(0.7)", or a mixture written as
  /// "0.5*IG(6,1)+0.5*IG(6,4)".
  static PriorSpec parse(std::string_view text);

  const Variant& variant() const noexcept { return value_; }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value_);
  }

  /// E[sigma^2]; +inf when it does not exist.
  double mean() const;
  std::string to_string() const;

 private:
  explicit PriorSpec(Variant v) : value_(std::move(v)) {}
  Variant value_;
};

double draw_prior(const PriorSpec& prior, Rng& rng);

}  // namespace nebv
