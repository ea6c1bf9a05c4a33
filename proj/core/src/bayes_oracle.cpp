#include "nebv/bayes_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "log_sum_exp.hpp"

namespace nebv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LogIntegral {
  double log_value = kNegInf;
  double rel_error = 0.0;
};

using LogKernel = std::function<double(double)>;  // log integrand in x = log(sigma^2)

// log of (k/2)^{k/2} / Gamma(k/2): the sampling density of S^2 is
// exp(log_ck) * y^{k/2} t^{k/2-1} exp(-k t y / 2) with y = 1/sigma^2.
double log_ck(DegreesOfFreedom k) { return k.half() * std::log(k.half()) - std::lgamma(k.half()); }

// Quadrature of exp(f) on the real line. The support is located on a grid and
// the integrand is rescaled by its peak so that only the log ever overflows.
LogIntegral log_integrate(const LogKernel& f, const QuadratureConfig& cfg) {
  double peak = kNegInf;
  std::vector<double> values;
  const auto n = static_cast<std::size_t>(std::ceil((cfg.grid_hi - cfg.grid_lo) / cfg.grid_step));
  values.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = f(cfg.grid_lo + cfg.grid_step * static_cast<double>(i));
    values.push_back(std::isnan(v) ? kNegInf : v);
    peak = std::max(peak, values.back());
  }
  if (peak == kNegInf) return {};
  if (!std::isfinite(peak)) throw QuadratureError("integrand is not finite", peak);

  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (values[i] > peak - cfg.log_cutoff) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first == 0 || last == n) {
    throw QuadratureError("integrand mass reaches the edge of the log(sigma^2) scan range",
                          std::numeric_limits<double>::infinity());
  }
  const double lo = cfg.grid_lo + cfg.grid_step * static_cast<double>(first - 1);
  const double hi = cfg.grid_lo + cfg.grid_step * static_cast<double>(last + 1);

  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double x) { return std::exp(f(x) - peak); }, lo, hi, cfg.max_depth, cfg.rel_tol, &error,
      &l1);
  if (!(value > 0.0)) return {};
  if (error > 10.0 * cfg.rel_tol * l1) {
    std::ostringstream os;
    os << "adaptive quadrature did not reach rel_tol=" << cfg.rel_tol
       << " (achieved error estimate " << error / value << ")";
    throw QuadratureError(os.str(), error / value);
  }
  return {peak + std::log(value), error / value};
}

double prior_log_density_in_log_scale(const PriorSpec& prior, double x) {
  if (const auto* ig = prior.get_if<InverseGammaPrior>()) {
    return ig->shape * std::log(ig->scale) - std::lgamma(ig->shape) - ig->shape * x -
           ig->scale * std::exp(-x);
  }
  if (const auto* g = prior.get_if<GammaPrior>()) {
    return g->shape * x - std::exp(x) / g->scale - std::lgamma(g->shape) -
           g->shape * std::log(g->scale);
  }
  if (const auto* ln = prior.get_if<LogNormalPrior>()) {
    const double z = x - ln->mu;
    return -0.5 * z * z / ln->tau2 - 0.5 * std::log(2.0 * std::numbers::pi * ln->tau2);
  }
  throw std::logic_error("no density for this prior family");
}

// log of int kernel(sigma^2) dPi(sigma^2), kernel given as a function of log(sigma^2).
LogIntegral integrate_against_prior(const PriorSpec& prior, const LogKernel& kernel,
                                    const QuadratureConfig& cfg) {
  if (const auto* pm = prior.get_if<PointMassPrior>()) return {kernel(std::log(pm->value)), 0.0};
  if (const auto* mix = prior.get_if<MixturePrior>()) {
    std::vector<double> terms;
    double err = 0.0;
    for (std::size_t i = 0; i < mix->weights.size(); ++i) {
      if (mix->weights[i] <= 0.0) continue;
      const LogIntegral part = integrate_against_prior(mix->components[i], kernel, cfg);
      terms.push_back(std::log(mix->weights[i]) + part.log_value);
      err = std::max(err, part.rel_error);
    }
    return {detail::log_sum_exp(terms), err};
  }
  return log_integrate(
      [&](double x) { return kernel(x) + prior_log_density_in_log_scale(prior, x); }, cfg);
}

// Inner integrals over t, in closed form, for a fixed sigma^2 = exp(x):
//   int_u^inf t^{-(k/2-1)} f(t|sigma^2) dt = C_k y^{k/2} exp(-lambda u) / lambda
//   int_u^inf t^{-(k/2-2)} f(t|sigma^2) dt = C_k y^{k/2} exp(-lambda u) (u/lambda + 1/lambda^2)
// with y = 1/sigma^2 and lambda = k y / 2.
double log_inner_b(double x, double u, DegreesOfFreedom k, double lck) {
  const double log_y = -x;
  const double lambda = k.half() * std::exp(log_y);
  return lck + k.half() * log_y - lambda * u - std::log(lambda);
}

double log_inner_a(double x, double u, DegreesOfFreedom k, double lck) {
  const double log_y = -x;
  const double log_lambda = std::log(k.half()) + log_y;
  const double lambda = std::exp(log_lambda);
  const double log_bracket =
      detail::log_add_exp(std::log(u) - log_lambda, -2.0 * log_lambda);
  return lck + k.half() * log_y - lambda * u + log_bracket;
}

// log E[y^m exp(-c y)] for y ~ Gamma(alpha, rate beta).
double log_gamma_laplace_moment(double alpha, double beta, double m, double c) {
  return alpha * std::log(beta) + std::lgamma(alpha + m) - std::lgamma(alpha) -
         (alpha + m) * std::log(beta + c);
}

TailMoments invgamma_tail_moments(const InverseGammaPrior& ig, double u, DegreesOfFreedom k) {
  const double a = ig.shape;
  const double b = ig.scale;
  if (!(a + k.half() - 2.0 > 0.0)) {
    throw std::invalid_argument("tail moment int t^{-(k/2-2)} dM diverges: need alpha + k/2 > 2");
  }
  const double lck = log_ck(k);
  const double c = k.half() * u;
  const double log_b = lck + std::log(2.0 / k.value()) + log_gamma_laplace_moment(a, b, k.half() - 1.0, c);
  const double g1 = log_gamma_laplace_moment(a, b, k.half() - 1.0, c);
  const double g2 = log_gamma_laplace_moment(a, b, k.half() - 2.0, c);
  const double term1 = u > 0.0 ? std::log(2.0 * u / k.value()) + g1 : kNegInf;
  const double term2 = std::log(4.0 / (static_cast<double>(k.value()) * k.value())) + g2;
  return {lck + detail::log_add_exp(term1, term2), log_b};
}

TailMoments closed_or_quadrature(const PriorSpec& prior, double u, DegreesOfFreedom k,
                                 const QuadratureConfig& cfg, bool force_quadrature) {
  const double lck = log_ck(k);
  if (!force_quadrature) {
    if (const auto* ig = prior.get_if<InverseGammaPrior>()) return invgamma_tail_moments(*ig, u, k);
    if (const auto* mix = prior.get_if<MixturePrior>()) {
      std::vector<double> la, lb;
      for (std::size_t i = 0; i < mix->weights.size(); ++i) {
        if (mix->weights[i] <= 0.0) continue;
        const TailMoments part = closed_or_quadrature(mix->components[i], u, k, cfg, false);
        la.push_back(std::log(mix->weights[i]) + part.log_a);
        lb.push_back(std::log(mix->weights[i]) + part.log_b);
      }
      return {detail::log_sum_exp(la), detail::log_sum_exp(lb)};
    }
  }
  if (const auto* ig = prior.get_if<InverseGammaPrior>()) {
    if (!(ig->shape + k.half() - 2.0 > 0.0)) {
      throw std::invalid_argument("tail moment int t^{-(k/2-2)} dM diverges: need alpha + k/2 > 2");
    }
  }
  const LogIntegral a =
      integrate_against_prior(prior, [&](double x) { return log_inner_a(x, u, k, lck); }, cfg);
  const LogIntegral b =
      integrate_against_prior(prior, [&](double x) { return log_inner_b(x, u, k, lck); }, cfg);
  return {a.log_value, b.log_value};
}

}  // namespace

double bayes_oracle_invgamma(double s2, DegreesOfFreedom k, double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) throw std::invalid_argument("IG oracle needs alpha, beta > 0");
  if (!(s2 >= 0.0)) throw std::invalid_argument("IG oracle needs s2 >= 0");
  const double denom = alpha + k.half() - 2.0;
  if (!(denom > 0.0)) {
    throw std::invalid_argument(
        "IG oracle needs alpha + k/2 > 2 (second posterior moment does not exist)");
  }
  return (beta + k.half() * s2) / denom;
}

TailMoments marginal_tail_moments(const PriorSpec& prior, double u, DegreesOfFreedom k,
                                  const QuadratureConfig& cfg) {
  if (!(u >= 0.0)) throw std::invalid_argument("tail moments need u >= 0");
  return closed_or_quadrature(prior, u, k, cfg, false);
}

TailMoments marginal_tail_moments_quadrature(const PriorSpec& prior, double u, DegreesOfFreedom k,
                                             const QuadratureConfig& cfg) {
  if (!(u >= 0.0)) throw std::invalid_argument("tail moments need u >= 0");
  return closed_or_quadrature(prior, u, k, cfg, true);
}

OracleRoutes bayes_oracle_routes(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                                 const QuadratureConfig& cfg) {
  if (!(s2 > 0.0)) throw std::invalid_argument("Bayes oracle needs s2 > 0");
  const double lck = log_ck(k);
  const double log_s = std::log(s2);
  // sigma^2 f(s^2 | sigma^2) and sigma^4 f(s^2 | sigma^2) in log(sigma^2) = x.
  auto log_sampling = [&](double x) {
    const double log_y = -x;
    return lck + k.half() * log_y + (k.half() - 1.0) * log_s - k.half() * s2 * std::exp(log_y);
  };
  const LogIntegral n = integrate_against_prior(
      prior, [&](double x) { return x + log_sampling(x); }, cfg);
  const LogIntegral h = integrate_against_prior(
      prior, [&](double x) { return 2.0 * x + log_sampling(x); }, cfg);

  const LogIntegral a = integrate_against_prior(
      prior, [&](double x) { return log_inner_a(x, s2, k, lck); }, cfg);
  const LogIntegral b = integrate_against_prior(
      prior, [&](double x) { return log_inner_b(x, s2, k, lck); }, cfg);

  OracleRoutes out;
  out.posterior_moments = std::exp(h.log_value - n.log_value);
  out.tail_moments = k.half() * (std::exp(a.log_value - b.log_value) - s2);
  out.rel_error_estimate = n.rel_error + h.rel_error + a.rel_error + b.rel_error;
  return out;
}

double bayes_oracle_numeric(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                            const QuadratureConfig& cfg) {
  if (const auto* pm = prior.get_if<PointMassPrior>()) return pm->value;
  const OracleRoutes routes = bayes_oracle_routes(prior, s2, k, cfg);
  // The tail-moment route subtracts s^2 from A/B ~ s^2 + 2 sigma_B^2 / k, which
  // amplifies relative error by about 1 + k s^2 / (2 sigma_B^2).
  const double amplification = 1.0 + k.half() * s2 / routes.posterior_moments;
  const double tol = std::max(1e-6, 100.0 * cfg.rel_tol) * amplification;
  const double diff = std::abs(routes.posterior_moments - routes.tail_moments);
  if (diff > tol * routes.posterior_moments) {
    std::ostringstream os;
    os << "Bayes oracle routes disagree at s2=" << s2 << ": posterior moments "
       << routes.posterior_moments << " vs tail moments " << routes.tail_moments;
    throw QuadratureError(os.str(), diff / routes.posterior_moments);
  }
  return routes.posterior_moments;
}

double bayes_oracle(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                    const QuadratureConfig& cfg) {
  if (const auto* ig = prior.get_if<InverseGammaPrior>()) {
    return bayes_oracle_invgamma(s2, k, ig->shape, ig->scale);
  }
  if (const auto* pm = prior.get_if<PointMassPrior>()) return pm->value;
  return bayes_oracle_numeric(prior, s2, k, cfg);
}

double tail_domain_upper(const PriorSpec& prior, DegreesOfFreedom k, double delta,
                         const QuadratureConfig& cfg) {
  if (!(delta > 0.0)) throw std::invalid_argument("D^delta needs delta > 0");
  const double log_delta = std::log(delta);
  auto excess = [&](double u) { return marginal_tail_moments(prior, u, k, cfg).log_b - log_delta; };
  if (excess(0.0) <= 0.0) return 0.0;

  double scale = prior.mean();
  if (!std::isfinite(scale) || !(scale > 0.0)) scale = 1.0;
  double lo = scale, hi = scale;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("D^delta upper end not found");
  }
  while (excess(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-14; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (excess(mid) > 0.0) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace nebv
