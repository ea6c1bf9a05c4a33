#include "nebv/quantile.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nebv {

namespace {

// Acklam's rational approximation to the lower-tail normal quantile
// (relative error ~1e-9), refined below by Halley steps.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kCfEps = 1e-16;
constexpr double kCfTiny = 1e-300;
constexpr int kCfMaxIter = 1'000'000;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kCfTiny) d = kCfTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kCfTiny) d = kCfTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kCfTiny) c = kCfTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kCfTiny) d = kCfTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kCfTiny) c = kCfTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kCfEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// I_x(a,b) given both x and y = 1 - x, so callers can supply whichever side
// they know to full precision.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double student_t_log_pdf(double t, double df) {
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
         0.5 * std::log(df * std::numbers::pi) - 0.5 * (df + 1.0) * std::log1p(t * t / df);
}

}  // namespace

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double q) {
  require_probability(q, "normal_quantile: q");
  if (q == 0.5) return 0.0;
  if (q > 0.5) return -normal_quantile(1.0 - q);

  // Lower-tail quantile x <= 0 of q; erfc(-x/sqrt2) is accurate on this side.
  double x = acklam_lower(q);
  for (int step = 0; step < 2; ++step) {
    const double log_pdf = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    if (log_pdf < -700.0) break;
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - q;
    const double u = e / std::exp(log_pdf);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return -x;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_upper_tail: df must be > 0");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double two_sided = incomplete_beta_xy(0.5 * df, 0.5, x, y);  // P(|T| > |t|)
  return t > 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
}

double student_t_quantile(double q, DegreesOfFreedom k) {
  return student_t_quantile(q, static_cast<double>(k.value()));
}

double student_t_quantile(double q, double df) {
  require_probability(q, "student_t_quantile: q");
  if (!(df > 0.0)) throw std::invalid_argument("student_t_quantile: df must be > 0");
  if (q == 0.5) return 0.0;
  if (q > 0.5) return -student_t_quantile(1.0 - q, df);

  if (df == 1.0) {
    const double angle = std::numbers::pi * q;
    return std::cos(angle) / std::sin(angle);
  }
  if (df == 2.0) return (1.0 - 2.0 * q) / std::sqrt(2.0 * q * (1.0 - q));

  // Bracket the root of log P(T > t) = log q on t >= 0, then run Newton in
  // log space with bisection as a safeguard.
  const double log_q = std::log(q);
  auto residual = [&](double t) { return std::log(student_t_upper_tail(t, df)) - log_q; };

  double lo = 0.0;
  double hi = std::max(1.0, normal_quantile(q));
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("student_t_quantile: bracket overflow");
  }

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double tail = student_t_upper_tail(t, df);
    const double f = std::log(tail) - log_q;
    if (f > 0.0) lo = t; else hi = t;
    // d/dt log tail = -pdf / tail
    const double slope = -std::exp(student_t_log_pdf(t, df)) / tail;
    double next = t - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t)) || hi - lo <= 1e-15 * hi) {
      return next;
    }
    t = next;
  }
  return t;
}

}  // namespace nebv
