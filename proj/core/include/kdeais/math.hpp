#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace kdeais {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kSqrtTwo = 1.4142135623730950488;

/// Standard normal pdf.
inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z - 0.5 * kLogTwoPi);
}

/// Standard normal CDF via erfc; accurate in both tails.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrtTwo); }

/// Standard normal survival function 1 - Phi(z), accurate for large z.
inline double norm_sf(double z) { return 0.5 * std::erfc(z / kSqrtTwo); }

/// Standard normal quantile. Acklam's rational approximation polished with a
/// Halley step; max observed error is below 3e-16 over (1e-300, 1-1e-16).
double norm_ppf(double p);

/// log(exp(a) + exp(b)) without overflow; handles -inf arguments.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(std::abs(a - b))));
}

/// Stable log of a sum of exponentials.
double log_sum_exp(std::span<const double> values);

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased (n-1) sample variance
  long n = 0;
};

/// One-pass Welford mean/variance.
MeanVar mean_var(std::span<const double> values);

/// Median of a copy of the input (not destructive).
double median(std::span<const double> values);

/// Chi-squared upper quantile via the Wilson-Hilferty cube approximation;
/// adequate for goodness-of-fit gates at df >= 10.
double chi2_upper_quantile(double dof, double upper_tail_prob);

}  // namespace kdeais
