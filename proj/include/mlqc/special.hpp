#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Self-contained special functions backing every analytic p-value in the
// library. Series/continued-fraction truncation targets are fixed at 1e-12
// internally, giving absolute errors comfortably below the 1e-10 contract.

namespace mlqc {

namespace detail {
inline constexpr double kEps = 1e-15;
inline constexpr double kTiny = 1e-300;
inline constexpr int kMaxIter = 500;
}  // namespace detail

// Regularized lower incomplete gamma P(a, x). Series expansion for
// x < a + 1, continued fraction for the complement otherwise.
inline double reg_inc_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("reg_inc_gamma: a must be > 0");
  if (!(x >= 0.0)) throw std::domain_error("reg_inc_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;

  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) = e^{-x} x^a / Gamma(a) * sum_{k>=0} x^k / (a (a+1)...(a+k))
    double term = 1.0 / a;
    double sum = term;
    double denom = a;
    for (int k = 1; k < detail::kMaxIter; ++k) {
      denom += 1.0;
      term *= x / denom;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * detail::kEps) break;
    }
    return std::min(1.0, std::exp(log_prefactor) * sum);
  }
  // Q(a,x) via Lentz's continued fraction, then P = 1 - Q.
  double b = x + 1.0 - a;
  double c = 1.0 / detail::kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < detail::kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::fabs(c) < detail::kTiny) c = detail::kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < detail::kEps) break;
  }
  const double q = std::exp(log_prefactor) * h;
  return std::min(1.0, std::max(0.0, 1.0 - q));
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
// directly in the tail so small survival probabilities keep precision.
inline double reg_inc_gamma_upper(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("reg_inc_gamma: a must be > 0");
  if (!(x >= 0.0)) throw std::domain_error("reg_inc_gamma: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - reg_inc_gamma(a, x);
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  double b = x + 1.0 - a;
  double c = 1.0 / detail::kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < detail::kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::fabs(c) < detail::kTiny) c = detail::kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < detail::kEps) break;
  }
  return std::min(1.0, std::max(0.0, std::exp(log_prefactor) * h));
}

namespace detail {
// Continued fraction for the incomplete beta (Lentz).
inline double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}
}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("reg_inc_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("reg_inc_beta: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * detail::beta_cf(a, b, x) / a;
  } else {
    result = 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
  }
  return std::min(1.0, std::max(0.0, result));
}

// Kolmogorov distribution survival function
// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
// truncated once terms drop below 1e-12 and clamped to [0, 1]. At
// lambda = 0 the alternating sum diverges; the clamped value 1 is returned.
inline double kolmogorov_sf(double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("kolmogorov_sf: lambda < 0");
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < detail::kMaxIter; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

inline double normal_sf(double x) {
  return 0.5 * std::erfc(x / 1.4142135623730950488016887242097);
}

// Standard normal quantile. Acklam's rational approximation refined with one
// Halley step against erfc; absolute error is below 1e-10 over (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must be in (0,1)");
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
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = normal_cdf(x) - p;
  const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

// Chi-square distribution with df degrees of freedom.
inline double chi_square_cdf(double df, double x) {
  if (!(df > 0.0)) throw std::domain_error("chi_square_cdf: df must be > 0");
  if (x <= 0.0) return 0.0;
  return reg_inc_gamma(0.5 * df, 0.5 * x);
}

inline double chi_square_sf(double df, double x) {
  if (!(df > 0.0)) throw std::domain_error("chi_square_sf: df must be > 0");
  if (x <= 0.0) return 1.0;
  return reg_inc_gamma_upper(0.5 * df, 0.5 * x);
}

// Two-sided p-value for a Student-t statistic:
// P(|T_df| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t: df must be > 0");
  if (t == 0.0) return 1.0;
  return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace mlqc
