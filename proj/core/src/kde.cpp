#include "kdeais/kde.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kdeais/math.hpp"

namespace kdeais {

Eigen::MatrixXd normal_reference_bandwidth(const Eigen::MatrixXd& samples, double effective_n) {
  const long d = samples.rows();
  const long n = samples.cols();
  if (n < 2) throw std::invalid_argument("normal_reference_bandwidth: needs n >= 2 samples");
  if (!(effective_n >= 2.0)) throw std::invalid_argument("normal_reference_bandwidth: effective n >= 2 required");

  const Eigen::VectorXd mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n - 1);

  // Singular covariance: keep only the diagonal.
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || (cov.diagonal().array() <= 0.0).any()) {
    cov = cov.diagonal().cwiseMax(1e-300).asDiagonal();
  }

  const double dd = static_cast<double>(d);
  const double factor = std::pow(4.0 / (dd + 2.0), 2.0 / (dd + 4.0)) *
                        std::pow(effective_n, -2.0 / (dd + 4.0));
  return factor * cov;
}

double normal_reference_scalar_bandwidth(const Eigen::MatrixXd& samples, double effective_n) {
  const Eigen::MatrixXd h = normal_reference_bandwidth(samples, effective_n);
  return std::sqrt(h.trace() / static_cast<double>(h.rows()));
}

double eta_schedule(long n, double c, double gamma) {
  if (n < 1) throw std::invalid_argument("eta_schedule: n >= 1 required");
  if (!(c > 0.0)) throw std::invalid_argument("eta_schedule: c > 0 required");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("eta_schedule: gamma must lie in (0, 1)");
  }
  return std::min(1.0, c * std::pow(static_cast<double>(n), -gamma));
}

std::optional<WeightedKde> WeightedKde::build(std::shared_ptr<const Eigen::MatrixXd> pilots,
                                              const Eigen::VectorXd& probs, double alpha,
                                              double bandwidth) {
  if (!pilots || pilots->cols() == 0) throw std::invalid_argument("WeightedKde: pilot set is empty");
  if (probs.size() != pilots->cols()) throw std::invalid_argument("WeightedKde: probs size != pilot count");
  if ((probs.array() < 0.0).any() || (probs.array() > 1.0).any()) {
    throw std::invalid_argument("WeightedKde: probs must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("WeightedKde: alpha must lie in (0, 1]");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("WeightedKde: bandwidth must be positive");

  const long m = probs.size();
  Eigen::VectorXd raw = probs.array().pow(alpha).matrix();
  const double total = raw.sum();
  if (!(total > 0.0)) return std::nullopt;  // degenerate-weights signal

  WeightedKde kde;
  kde.pilots_ = std::move(pilots);
  kde.bandwidth_ = bandwidth;
  kde.alpha_ = alpha;
  kde.raw_weight_sum_ = total;

  const double floor = 1e-12 / static_cast<double>(m);
  std::vector<int> active;
  active.reserve(static_cast<size_t>(m));
  for (long j = 0; j < m; ++j) {
    if (raw[j] / total >= floor) active.push_back(static_cast<int>(j));
  }
  kde.active_indices_ = std::move(active);
  const long na = static_cast<long>(kde.active_indices_.size());
  kde.active_weights_.resize(na);
  for (long i = 0; i < na; ++i) {
    kde.active_weights_[i] = raw[kde.active_indices_[static_cast<size_t>(i)]] / total;
  }
  kde.weight_cdf_.resize(static_cast<size_t>(na));
  double acc = 0.0;
  for (long i = 0; i < na; ++i) {
    acc += kde.active_weights_[i];
    kde.weight_cdf_[static_cast<size_t>(i)] = acc;
  }
  return kde;
}

double WeightedKde::normalized_weight(long j) const {
  const auto it = std::lower_bound(active_indices_.begin(), active_indices_.end(), static_cast<int>(j));
  if (it == active_indices_.end() || *it != static_cast<int>(j)) return 0.0;
  return active_weights_[it - active_indices_.begin()];
}

double WeightedKde::log_density(const Eigen::VectorXd& z) const {
  if (z.size() != dim()) throw std::invalid_argument("WeightedKde::log_density: dimension mismatch");
  const double inv2h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  const long na = active_weights_.size();
  double max_e = kNegInf;
  Eigen::VectorXd exponents(na);
  for (long i = 0; i < na; ++i) {
    const double d2 = (pilots_->col(active_indices_[static_cast<size_t>(i)]) - z).squaredNorm();
    const double e = std::log(active_weights_[i]) - d2 * inv2h2;
    exponents[i] = e;
    max_e = std::max(max_e, e);
  }
  if (max_e == kNegInf) return kNegInf;
  const double s = (exponents.array() - max_e).exp().sum();
  const double log_norm = 0.5 * static_cast<double>(dim()) * (kLogTwoPi + 2.0 * std::log(bandwidth_));
  return max_e + std::log(s) - log_norm;
}

Eigen::VectorXd WeightedKde::sample(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, weight_cdf_.back())(rng);
  const auto it = std::lower_bound(weight_cdf_.begin(), weight_cdf_.end(), u);
  const size_t pick = std::min(static_cast<size_t>(it - weight_cdf_.begin()),
                               active_indices_.size() - 1);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd z = pilots_->col(active_indices_[pick]);
  for (int i = 0; i < dim(); ++i) z[i] += bandwidth_ * gauss(rng);
  return z;
}

}  // namespace kdeais
