#include "nebv/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nebv/quantile.hpp"

namespace nebv {

SelectionResult select_top(const SampleSet& sample) {
  const auto x = sample.x();
  const auto s2 = sample.s2();
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double t = std::abs(x[i]) / std::sqrt(s2[i]);
    if (t > best_abs) {
      best_abs = t;
      best = i;
    }
  }
  return {best, x[best] / std::sqrt(s2[best]), s2[best], x[best]};
}

std::vector<std::size_t> select_top_m(const SampleSet& sample, std::size_t m) {
  const auto x = sample.x();
  const auto s2 = sample.s2();
  std::vector<std::size_t> idx(sample.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto abs_t = [&](std::size_t i) { return std::abs(x[i]) / std::sqrt(s2[i]); };
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return abs_t(a) > abs_t(b); });
  idx.resize(std::min(m, idx.size()));
  return idx;
}

double truncation_floor(std::span<const double> variances, double gamma_star) {
  require_probability(gamma_star, "gamma*");
  const double z = normal_quantile(gamma_star);
  const double total = std::accumulate(variances.begin(), variances.end(), 0.0);
  return (z * z + z * std::sqrt(z * z + 2.0 * total)) / static_cast<double>(variances.size());
}

HyperParams estimate_hyperparams(std::span<const double> x, std::span<const double> variances,
                                 double gamma_star, MeanWeighting weighting) {
  require_probability(gamma_star, "gamma*");
  if (x.empty() || x.size() != variances.size()) {
    throw std::invalid_argument("estimate_hyperparams: X and variances must be non-empty and equal length");
  }
  require_positive(variances, "estimate_hyperparams variances");
  const auto p = static_cast<double>(x.size());

  HyperParams h;
  h.gamma_star = gamma_star;
  if (weighting == MeanWeighting::kPrecision) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += x[i] / variances[i];
      den += 1.0 / variances[i];
    }
    h.mu = num / den;
  } else {
    h.mu = std::accumulate(x.begin(), x.end(), 0.0) / p;
  }

  double spread = 0.0;
  for (double xi : x) spread += (xi - h.mu) * (xi - h.mu);
  const double mean_var = std::accumulate(variances.begin(), variances.end(), 0.0) / p;
  const double raw = spread / p - mean_var;
  h.tau0_2 = truncation_floor(variances, gamma_star);
  h.truncated = !(raw > h.tau0_2);
  h.tau2 = h.truncated ? h.tau0_2 : raw;
  return h;
}

Interval eb_interval(double x, double variance, const HyperParams& hyper, double gamma) {
  require_probability(gamma, "gamma");
  if (!(variance > 0.0)) throw std::invalid_argument("eb_interval: variance must be > 0");
  if (!(hyper.tau2 > 0.0)) throw std::invalid_argument("eb_interval: tau2 must be > 0");
  const double z = normal_quantile(0.5 * gamma);
  if (std::isinf(hyper.tau2)) return make_interval(x, z * std::sqrt(variance), 1.0 - gamma);

  const double total = variance + hyper.tau2;
  const double shrink = hyper.tau2 / total;
  const double center = shrink * x + (variance / total) * hyper.mu;
  const double half_width = z * std::sqrt(variance * shrink);
  return make_interval(center, half_width, 1.0 - gamma);
}

Interval bonferroni_t_interval(double x, double variance, DegreesOfFreedom k, std::size_t p,
                               double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("bonferroni: gamma must lie in (0,1]");
  if (p == 0) throw std::invalid_argument("bonferroni: p must be >= 1");
  if (!(variance > 0.0)) throw std::invalid_argument("bonferroni: variance must be > 0");
  const double q = gamma / (2.0 * static_cast<double>(p));
  const double t = student_t_quantile(q, k);
  return make_interval(x, t * std::sqrt(variance), 1.0 - gamma);
}

PipelineResult selected_interval_pipeline(const SampleSet& sample,
                                          const VarianceEstimator& estimator,
                                          const PipelineOptions& options) {
  if (!(options.observation_scale > 0.0)) {
    throw std::invalid_argument("pipeline: observation_scale must be > 0");
  }
  PipelineResult out;
  out.selection = select_top(sample);
  out.sigma2_hat = estimator.estimate(sample.s2(), sample.k());

  std::vector<double> obs_var(out.sigma2_hat.size());
  for (std::size_t i = 0; i < obs_var.size(); ++i) {
    obs_var[i] = out.sigma2_hat[i] * options.observation_scale;
  }
  out.hyper = estimate_hyperparams(sample.x(), obs_var, options.gamma_star, options.weighting);

  const std::size_t i = out.selection.index;
  out.interval = eb_interval(sample.x()[i], obs_var[i], out.hyper, options.gamma);
  if (options.adjustment) {
    const AdjustmentContext ctx{sample, out.selection, out.hyper, out.sigma2_hat[i], obs_var[i]};
    out.interval = options.adjustment(out.interval, ctx);
  }
  return out;
}

}  // namespace nebv
