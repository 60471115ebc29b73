#pragma once

#include <random>
#include <string>

namespace kdeais {

enum class MarginalKind { kUniform, kNormal, kLognormal, kTruncatedNormal };

/// One univariate input distribution in the native units of the experiment.
/// Densities are evaluated in log space throughout; sampling of truncated
/// normals uses the inverse CDF restricted to the truncated quantile range.
class Marginal {
 public:
  static Marginal uniform(double lo, double hi);
  static Marginal normal(double mean, double sd);
  static Marginal lognormal(double mu_log, double sigma_log);
  static Marginal truncated_normal(double mean, double sd, double lo, double hi);

  MarginalKind kind() const { return kind_; }

  double log_pdf(double x) const;
  double cdf(double x) const;
  double ppf(double u) const;  // quantile, u in [0, 1]
  double sample(std::mt19937_64& rng) const;

  /// Support interval; +-inf for unbounded sides.
  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }
  bool bounded() const;
  bool in_support(double x) const { return x >= support_lo_ && x <= support_hi_; }

  double mean() const;
  double sd() const;

  // Raw parameters (interpretation depends on kind).
  double a() const { return a_; }
  double b() const { return b_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  std::string describe() const;
  bool operator==(const Marginal& other) const = default;

 private:
  Marginal(MarginalKind kind, double a, double b, double lo, double hi);

  MarginalKind kind_;
  double a_ = 0.0;  // lo / mean / mu_log / mean
  double b_ = 0.0;  // hi / sd / sigma_log / sd
  double lo_ = 0.0, hi_ = 0.0;  // truncation bounds where applicable
  double support_lo_ = 0.0, support_hi_ = 0.0;
  // Cached truncated-normal normalization: Phi(bhat) - Phi(ahat), and Phi(ahat).
  double trunc_z_ = 1.0, trunc_cdf_lo_ = 0.0;
};

}  // namespace kdeais
