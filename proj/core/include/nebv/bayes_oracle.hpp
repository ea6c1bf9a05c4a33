#pragma once

#include "nebv/prior.hpp"
#include "nebv/types.hpp"

namespace nebv {

/// Settings for the adaptive Gauss-Kronrod integration over log(sigma^2).
struct QuadratureConfig {
  double rel_tol = 1e-9;
  unsigned max_depth = 20;
  double grid_lo = -60.0;  // support scan range in log(sigma^2)
  double grid_hi = 60.0;
  double grid_step = 0.1;
  double log_cutoff = 60.0;  // ignore regions below peak * exp(-log_cutoff)
};

/// Bayes rule under L1 for an inverse-gamma prior: the ratio of the first two
/// posterior moments under the conjugate posterior IG(alpha + k/2, beta + k s^2/2),
///   (beta + k s^2 / 2) / (alpha + k/2 - 2).
/// Requires alpha + k/2 > 2 so the second posterior moment exists.
double bayes_oracle_invgamma(double s2, DegreesOfFreedom k, double alpha, double beta);

/// Population tail moments of the marginal M of S^2, in log form:
///   log_a = log int_u^inf t^{-(k/2-2)} dM(t),  log_b = log int_u^inf t^{-(k/2-1)} dM(t).
struct TailMoments {
  double log_a;
  double log_b;
};

/// Closed form for inverse-gamma and point-mass priors (and mixtures of them);
/// quadrature over the prior otherwise.
TailMoments marginal_tail_moments(const PriorSpec& prior, double u, DegreesOfFreedom k,
                                  const QuadratureConfig& cfg = {});

/// Always by quadrature over the prior, even where a closed form exists.
TailMoments marginal_tail_moments_quadrature(const PriorSpec& prior, double u, DegreesOfFreedom k,
                                             const QuadratureConfig& cfg = {});

/// The two numerical routes to the L1 Bayes rule at s^2.
struct OracleRoutes {
  double posterior_moments;  // h(s^2) / n(s^2)
  double tail_moments;       // (k/2) (A(s^2)/B(s^2) - s^2)
  double rel_error_estimate;
};

OracleRoutes bayes_oracle_routes(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                                 const QuadratureConfig& cfg = {});

/// L1 Bayes rule by quadrature; both routes are computed and must agree.
/// Throws QuadratureError on non-convergence or route disagreement.
double bayes_oracle_numeric(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                            const QuadratureConfig& cfg = {});

/// Closed form where available (inverse gamma, point mass), numeric otherwise.
double bayes_oracle(const PriorSpec& prior, double s2, DegreesOfFreedom k,
                    const QuadratureConfig& cfg = {});

/// Right end U of the domain D^delta = {u : B(u) > delta} = (0, U).
/// Returns 0 when the domain is empty.
double tail_domain_upper(const PriorSpec& prior, DegreesOfFreedom k, double delta,
                         const QuadratureConfig& cfg = {});

}  // namespace nebv
