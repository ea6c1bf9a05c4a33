#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nebv/nebv.hpp"
#include "nebv/types.hpp"

namespace nebv {

/// A simultaneous variance estimator: maps all p sample variances to p estimates.
/// Third-party estimators plug into the pipeline through this interface.
class VarianceEstimator {
 public:
  virtual ~VarianceEstimator() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> estimate(std::span<const double> s2, DegreesOfFreedom k) const = 0;
};

class NebvEstimator final : public VarianceEstimator {
 public:
  explicit NebvEstimator(std::size_t b = kDefaultTopB) : b_(b) {}
  std::string name() const override { return "nebv"; }
  std::vector<double> estimate(std::span<const double> s2, DegreesOfFreedom k) const override;
  std::size_t b() const noexcept { return b_; }

 private:
  std::size_t b_;
};

/// The unbiased baseline: sigma_hat^2 = S^2.
class SampleVarianceEstimator final : public VarianceEstimator {
 public:
  std::string name() const override { return "sample_variance"; }
  std::vector<double> estimate(std::span<const double> s2, DegreesOfFreedom k) const override;
};

struct EstimatorOptions {
  std::size_t b = kDefaultTopB;
};

/// Name -> factory map. `default_registry()` knows "nebv" and "sample_variance".
class EstimatorRegistry {
 public:
  using Factory = std::function<std::unique_ptr<VarianceEstimator>(const EstimatorOptions&)>;

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  std::unique_ptr<VarianceEstimator> make(const std::string& name,
                                          const EstimatorOptions& options) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory> factories_;
};

EstimatorRegistry& default_registry();

}  // namespace nebv
