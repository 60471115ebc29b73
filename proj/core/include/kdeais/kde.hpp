#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace kdeais {

/// Normal-reference bandwidth matrix H_NR = (4/(d+2))^{2/(d+4)} n^{-2/(d+4)} Sigma.
/// Falls back to the diagonal of Sigma when the sample covariance is singular.
Eigen::MatrixXd normal_reference_bandwidth(const Eigen::MatrixXd& samples, double effective_n);

/// Scalar reduction of H_NR: sqrt of the trace-average of the matrix rule.
double normal_reference_scalar_bandwidth(const Eigen::MatrixXd& samples, double effective_n);

/// Exploration schedule eta_n = min{1, c n^{-gamma}}. Requires c > 0 and
/// 0 < gamma < 1 (the sum over n must diverge).
double eta_schedule(long n, double c, double gamma);

/// Weighted Gaussian KDE over a pilot set shared between snapshots: the
/// pilot matrix is held by shared_ptr so per-iteration snapshots store only
/// their (sparse) weights. Coordinates are standardized; callers apply the
/// Jacobian when a native-units density is needed.
class WeightedKde {
 public:
  /// Weights are probs^alpha, normalized to sum 1; indices whose normalized
  /// weight falls below 1e-12/m are dropped from the active set (the density
  /// keeps them as ~0 mass). Returns nullopt when every prob is zero: the
  /// degenerate-weights signal, on which callers fall back to a
  /// pure-exploration iteration.
  static std::optional<WeightedKde> build(std::shared_ptr<const Eigen::MatrixXd> pilots,
                                          const Eigen::VectorXd& probs, double alpha,
                                          double bandwidth);

  int dim() const { return static_cast<int>(pilots_->rows()); }
  long pilot_count() const { return pilots_->cols(); }
  double bandwidth() const { return bandwidth_; }
  double alpha() const { return alpha_; }
  const std::shared_ptr<const Eigen::MatrixXd>& pilots() const { return pilots_; }

  long active_count() const { return static_cast<long>(active_indices_.size()); }
  const std::vector<int>& active_indices() const { return active_indices_; }
  const Eigen::VectorXd& active_weights() const { return active_weights_; }
  double raw_weight_sum() const { return raw_weight_sum_; }

  /// Normalized weight of pilot j (0 for dropped indices).
  double normalized_weight(long j) const;

  /// log q_hat(z) by a stable log-sum-exp over active components; -inf only
  /// when every component underflows past the representable range.
  double log_density(const Eigen::VectorXd& z) const;

  /// One draw: component ~ normalized weights, plus h * standard normal.
  Eigen::VectorXd sample(std::mt19937_64& rng) const;

 private:
  std::shared_ptr<const Eigen::MatrixXd> pilots_;  // d x m standardized
  double bandwidth_ = 0.0;
  double alpha_ = 1.0;
  double raw_weight_sum_ = 0.0;
  std::vector<int> active_indices_;  // sorted
  Eigen::VectorXd active_weights_;   // normalized (sums to <= 1, deficit <= 1e-12)
  std::vector<double> weight_cdf_;   // cumulative over active, for sampling
};

}  // namespace kdeais
