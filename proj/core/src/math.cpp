#include "kdeais/math.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace kdeais {

namespace {

// Acklam's inverse normal CDF approximation (relative error < 1.15e-9).
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return kNegInf;
    if (p == 1.0) return kInf;
    throw std::invalid_argument("norm_ppf: p must lie in [0, 1]");
  }
  double x = acklam(p);
  // Halley refinement against the erfc-based CDF.
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double log_sum_exp(std::span<const double> values) {
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

MeanVar mean_var(std::span<const double> values) {
  MeanVar out;
  double m = 0.0, m2 = 0.0;
  long n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - m;
    m += delta / static_cast<double>(n);
    m2 += delta * (v - m);
  }
  out.mean = m;
  out.var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  out.n = n;
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::vector<double> v(values.begin(), values.end());
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

double chi2_upper_quantile(double dof, double upper_tail_prob) {
  const double z = norm_ppf(1.0 - upper_tail_prob);
  const double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  return dof * t * t * t;
}

}  // namespace kdeais
