#pragma once

#include "nebv/types.hpp"

namespace nebv {

// All quantiles use the upper-tail convention: normal_quantile(q) is the z
// with P(Z > z) = q, so normal_quantile(0.025) ~ 1.96. This matches z_{gamma/2}
// and t_{k, gamma/(2p)} as they appear in the interval formulas.

/// P(Z > z) for standard normal Z.
double normal_upper_tail(double z);

/// Upper-tail standard normal quantile; absolute error below 1e-9 on (0,1).
double normal_quantile(double q);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(T > t) for Student t with `df` degrees of freedom (df > 0, real).
double student_t_upper_tail(double t, double df);

/// Upper-tail Student t quantile; relative error below 1e-8.
double student_t_quantile(double q, DegreesOfFreedom k);
double student_t_quantile(double q, double df);

}  // namespace nebv
