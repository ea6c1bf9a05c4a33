#include "nebv/estimators.hpp"

#include <stdexcept>

namespace nebv {

std::vector<double> NebvEstimator::estimate(std::span<const double> s2, DegreesOfFreedom k) const {
  return nebv_estimate(s2, k, b_).values;
}

std::vector<double> SampleVarianceEstimator::estimate(std::span<const double> s2,
                                                      DegreesOfFreedom) const {
  return {s2.begin(), s2.end()};
}

void EstimatorRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

bool EstimatorRegistry::contains(const std::string& name) const {
  return factories_.count(name) > 0;
}

std::unique_ptr<VarianceEstimator> EstimatorRegistry::make(const std::string& name,
                                                           const EstimatorOptions& options) const {
  const auto it = factories_.find(name);
  if (it == factories_.end()) {
    std::string valid;
    for (const auto& n : names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown estimator '" + name + "' (valid: " + valid + ")");
  }
  return it->second(options);
}

std::vector<std::string> EstimatorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

EstimatorRegistry& default_registry() {
  static EstimatorRegistry registry = [] {
    EstimatorRegistry r;
    r.add("nebv", [](const EstimatorOptions& o) { return std::make_unique<NebvEstimator>(o.b); });
    r.add("sample_variance",
          [](const EstimatorOptions&) { return std::make_unique<SampleVarianceEstimator>(); });
    return r;
  }();
  return registry;
}

}  // namespace nebv
