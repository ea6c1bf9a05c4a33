#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nebv/estimators.hpp"
#include "nebv/types.hpp"

namespace nebv {

struct SelectionResult {
  std::size_t index = 0;
  double t_value = 0.0;  // X / S at the selected coordinate, signed
  double s2_selected = 0.0;
  double x_selected = 0.0;
};

/// argmax_i |X_i| / S_i; ties go to the smallest index.
SelectionResult select_top(const SampleSet& sample);

/// Indices of the m largest |T| values, ordered by decreasing |T| (stable).
std::vector<std::size_t> select_top_m(const SampleSet& sample, std::size_t m);

enum class MeanWeighting {
  kUnweighted,  // mu_hat = mean(X)
  kPrecision,   // mu_hat = sum(X_i / v_i) / sum(1 / v_i)
};

/// tau0^2 = (z^2 + z sqrt(z^2 + 2 sum v_i)) / p with z the upper gamma* quantile.
double truncation_floor(std::span<const double> variances, double gamma_star);

/// Method-of-moments (mu_hat, tau_hat^2) from observations X with observation
/// variances v; tau_hat^2 is floored at tau0^2 so it is always positive.
HyperParams estimate_hyperparams(std::span<const double> x, std::span<const double> variances,
                                 double gamma_star,
                                 MeanWeighting weighting = MeanWeighting::kPrecision);

/// Empirical-Bayes interval for theta given observation x with variance v:
/// centre is the posterior mean shrunk toward mu_hat, half-width
/// z_{gamma/2} sqrt(v tau^2 / (v + tau^2)).
Interval eb_interval(double x, double variance, const HyperParams& hyper, double gamma);

/// x +- t_{k, gamma/(2p)} sqrt(variance). gamma may equal 1 (degenerate interval).
Interval bonferroni_t_interval(double x, double variance, DegreesOfFreedom k, std::size_t p,
                               double gamma);

struct AdjustmentContext {
  const SampleSet& sample;
  const SelectionResult& selection;
  const HyperParams& hyper;
  double sigma2_hat;            // variance estimate at the selected coordinate
  double observation_variance;  // sigma2_hat * observation_scale
};

/// Post-hoc interval adjustment hook; the default leaves the interval unchanged.
using IntervalAdjustment = std::function<Interval(const Interval&, const AdjustmentContext&)>;

struct PipelineOptions {
  double gamma = 0.05;
  double gamma_star = 0.05;
  MeanWeighting weighting = MeanWeighting::kPrecision;
  // Converts a variance estimate into the variance of X (1 for the one-sample
  // model, 1/n for a mean of n rows, 1/n1 + 1/n2 for a difference of means).
  double observation_scale = 1.0;
  IntervalAdjustment adjustment;  // empty = identity
};

struct PipelineResult {
  SelectionResult selection;
  std::vector<double> sigma2_hat;
  HyperParams hyper;
  Interval interval;
};

/// Select by max |T|, estimate all variances, estimate hyperparameters from the
/// plug-in variances, build the interval for the selected mean, then adjust.
PipelineResult selected_interval_pipeline(const SampleSet& sample,
                                          const VarianceEstimator& estimator,
                                          const PipelineOptions& options = {});

}  // namespace nebv
