#include "kdeais/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kdeais/math.hpp"

namespace kdeais {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Marginal::Marginal(MarginalKind kind, double a, double b, double lo, double hi)
    : kind_(kind), a_(a), b_(b), lo_(lo), hi_(hi) {
  switch (kind_) {
    case MarginalKind::kUniform:
      support_lo_ = a_;
      support_hi_ = b_;
      break;
    case MarginalKind::kNormal:
      support_lo_ = kNegInf;
      support_hi_ = kInf;
      break;
    case MarginalKind::kLognormal:
      support_lo_ = 0.0;
      support_hi_ = kInf;
      break;
    case MarginalKind::kTruncatedNormal: {
      support_lo_ = lo_;
      support_hi_ = hi_;
      trunc_cdf_lo_ = norm_cdf((lo_ - a_) / b_);
      trunc_z_ = norm_cdf((hi_ - a_) / b_) - trunc_cdf_lo_;
      require(trunc_z_ > 0.0, "truncated_normal: normalization constant must be positive");
      break;
    }
  }
}

Marginal Marginal::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi), "uniform: bounds must be finite");
  require(lo < hi, "uniform: requires lo < hi");
  return Marginal(MarginalKind::kUniform, lo, hi, lo, hi);
}

Marginal Marginal::normal(double mean, double sd) {
  require(std::isfinite(mean) && std::isfinite(sd), "normal: parameters must be finite");
  require(sd > 0.0, "normal: requires sd > 0");
  return Marginal(MarginalKind::kNormal, mean, sd, 0, 0);
}

Marginal Marginal::lognormal(double mu_log, double sigma_log) {
  require(std::isfinite(mu_log) && std::isfinite(sigma_log), "lognormal: parameters must be finite");
  require(sigma_log > 0.0, "lognormal: requires sigma_log > 0");
  return Marginal(MarginalKind::kLognormal, mu_log, sigma_log, 0, 0);
}

Marginal Marginal::truncated_normal(double mean, double sd, double lo, double hi) {
  require(std::isfinite(mean) && std::isfinite(sd), "truncated_normal: parameters must be finite");
  require(sd > 0.0, "truncated_normal: requires sd > 0");
  require(lo < hi, "truncated_normal: requires lo < hi");
  return Marginal(MarginalKind::kTruncatedNormal, mean, sd, lo, hi);
}

bool Marginal::bounded() const {
  return std::isfinite(support_lo_) && std::isfinite(support_hi_);
}

double Marginal::log_pdf(double x) const {
  if (!in_support(x)) return kNegInf;
  switch (kind_) {
    case MarginalKind::kUniform:
      return -std::log(b_ - a_);
    case MarginalKind::kNormal: {
      const double z = (x - a_) / b_;
      return -0.5 * z * z - 0.5 * kLogTwoPi - std::log(b_);
    }
    case MarginalKind::kLognormal: {
      if (x <= 0.0) return kNegInf;
      const double z = (std::log(x) - a_) / b_;
      return -0.5 * z * z - 0.5 * kLogTwoPi - std::log(b_) - std::log(x);
    }
    case MarginalKind::kTruncatedNormal: {
      const double z = (x - a_) / b_;
      return -0.5 * z * z - 0.5 * kLogTwoPi - std::log(b_) - std::log(trunc_z_);
    }
  }
  return kNegInf;
}

double Marginal::cdf(double x) const {
  if (x <= support_lo_) return 0.0;
  if (x >= support_hi_) return 1.0;
  switch (kind_) {
    case MarginalKind::kUniform:
      return (x - a_) / (b_ - a_);
    case MarginalKind::kNormal:
      return norm_cdf((x - a_) / b_);
    case MarginalKind::kLognormal:
      return norm_cdf((std::log(x) - a_) / b_);
    case MarginalKind::kTruncatedNormal:
      return (norm_cdf((x - a_) / b_) - trunc_cdf_lo_) / trunc_z_;
  }
  return 0.0;
}

double Marginal::ppf(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("ppf: u must lie in [0, 1]");
  switch (kind_) {
    case MarginalKind::kUniform:
      return a_ + u * (b_ - a_);
    case MarginalKind::kNormal:
      return a_ + b_ * norm_ppf(u);
    case MarginalKind::kLognormal:
      return std::exp(a_ + b_ * norm_ppf(u));
    case MarginalKind::kTruncatedNormal: {
      const double q = trunc_cdf_lo_ + u * trunc_z_;
      double x = a_ + b_ * norm_ppf(q);
      return std::clamp(x, lo_, hi_);
    }
  }
  return kNan;
}

double Marginal::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case MarginalKind::kUniform:
      return std::uniform_real_distribution<double>(a_, b_)(rng);
    case MarginalKind::kNormal:
      return a_ + b_ * std::normal_distribution<double>()(rng);
    case MarginalKind::kLognormal:
      return std::exp(a_ + b_ * std::normal_distribution<double>()(rng));
    case MarginalKind::kTruncatedNormal: {
      // Inverse CDF on the truncated quantile range: deterministic cost.
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      return ppf(u);
    }
  }
  return kNan;
}

double Marginal::mean() const {
  switch (kind_) {
    case MarginalKind::kUniform:
      return 0.5 * (a_ + b_);
    case MarginalKind::kNormal:
      return a_;
    case MarginalKind::kLognormal:
      return std::exp(a_ + 0.5 * b_ * b_);
    case MarginalKind::kTruncatedNormal: {
      const double alpha = (lo_ - a_) / b_;
      const double beta = (hi_ - a_) / b_;
      return a_ + b_ * (norm_pdf(alpha) - norm_pdf(beta)) / trunc_z_;
    }
  }
  return kNan;
}

double Marginal::sd() const {
  switch (kind_) {
    case MarginalKind::kUniform:
      return (b_ - a_) / std::sqrt(12.0);
    case MarginalKind::kNormal:
      return b_;
    case MarginalKind::kLognormal: {
      const double ev = std::exp(b_ * b_);
      return std::exp(a_ + 0.5 * b_ * b_) * std::sqrt(ev - 1.0);
    }
    case MarginalKind::kTruncatedNormal: {
      const double alpha = (lo_ - a_) / b_;
      const double beta = (hi_ - a_) / b_;
      const double pa = norm_pdf(alpha), pb = norm_pdf(beta);
      const double term1 = (alpha * pa - beta * pb) / trunc_z_;
      const double term2 = (pa - pb) / trunc_z_;
      const double var = b_ * b_ * (1.0 + term1 - term2 * term2);
      return std::sqrt(std::max(var, 0.0));
    }
  }
  return kNan;
}

std::string Marginal::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MarginalKind::kUniform:
      os << "uniform(" << a_ << ", " << b_ << ")";
      break;
    case MarginalKind::kNormal:
      os << "normal(" << a_ << ", " << b_ << ")";
      break;
    case MarginalKind::kLognormal:
      os << "lognormal(" << a_ << ", " << b_ << ")";
      break;
    case MarginalKind::kTruncatedNormal:
      os << "truncated_normal(" << a_ << ", " << b_ << ", " << lo_ << ", " << hi_ << ")";
      break;
  }
  return os.str();
}

}  // namespace kdeais
