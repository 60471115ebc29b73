#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "kdeais/standardizer.hpp"

namespace kdeais {

enum class KernelFamily { kSquaredExponential, kMatern52 };

/// Stationary anisotropic kernel. Lengthscales live in standardized (unit
/// cube) coordinates; the nugget is additive jitter on the diagonal.
struct KernelConfig {
  KernelFamily family = KernelFamily::kSquaredExponential;
  Eigen::VectorXd lengthscales;  // d positive reals
  double signal_variance = 1.0;
  double nugget = 1e-8;

  void validate(int dim) const;

  /// k(a, b) for standardized points.
  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Cross-covariance matrix k(A_i, B_j), A and B column-wise point sets.
  Eigen::MatrixXd cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;
};

struct GpFitOptions {
  KernelFamily family = KernelFamily::kSquaredExponential;
  int multistarts = 8;
  int max_evals_per_start = 100;
  double nugget = 1e-8;        // escalated x10 up to max_nugget on failure
  double max_nugget = 1e-2;
  std::uint64_t seed = 0;      // drives the multistart initializations
};

struct PosteriorValue {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP regression over oracle evaluations. Inputs are standardized via
/// the shared Standardizer, outputs centered and scaled to unit variance.
/// The Cholesky factor is cached and extended incrementally when data is
/// appended without a hyperparameter refit, so repeated per-iteration updates
/// cost O(n^2 b) instead of O(n^3).
class GpModel {
 public:
  /// Fits hyperparameters by multi-start local maximization of the log
  /// marginal likelihood over log-lengthscales and log-signal-variance.
  /// Requires n >= 2 finite points. With fewer than two distinct outputs a
  /// constant-mean fallback is used (posterior = observed constant, zero
  /// variance). Throws numerical_error if the kernel matrix stays indefinite
  /// after jitter escalation.
  static GpModel fit(const Eigen::MatrixXd& x_native, const Eigen::VectorXd& y,
                     const Standardizer& stdzr, const GpFitOptions& options);

  /// Appends data, reusing the current hyperparameters; the factorization is
  /// extended in place.
  void append(const Eigen::MatrixXd& x_native, const Eigen::VectorXd& y);

  /// Re-optimizes hyperparameters on the current data and rebuilds the
  /// factorization.
  void refit_hyperparameters(const GpFitOptions& options);

  /// Posterior mean / variance at a native-units point.
  PosteriorValue posterior(const Eigen::VectorXd& x_native) const;

  /// Batched posterior at column-wise native points.
  void posterior_batch(const Eigen::MatrixXd& x_native, Eigen::VectorXd& mean,
                       Eigen::VectorXd& variance) const;

  /// Batched posterior mean only (O(n d) per point).
  Eigen::VectorXd posterior_mean_batch(const Eigen::MatrixXd& x_native) const;

  /// pi_n(x) = 1 - Phi((t - mu_n(x)) / sigma_n(x)); collapses to the
  /// indicator 1{mu_n(x) > t} when the standardized posterior sd falls below
  /// sigma_floor.
  double soft_failure_prob(const Eigen::VectorXd& x_native, double threshold) const;

  /// Soft failure probability from already-standardized posterior moments.
  double soft_failure_prob_std(double mean_std, double var_std, double threshold) const;

  long size() const { return x_std_.cols(); }
  int dim() const { return static_cast<int>(x_std_.rows()); }
  const KernelConfig& kernel() const { return kernel_; }
  const Standardizer& standardizer() const { return stdzr_; }
  double output_center() const { return y_center_; }
  double output_scale() const { return y_scale_; }
  bool constant_fallback() const { return constant_fallback_; }
  double log_marginal_likelihood() const { return lml_; }

  /// Numeric value of the log marginal likelihood for given log-parameters
  /// (d log-lengthscales followed by log signal variance) on the current data.
  double log_marginal_likelihood_at(const Eigen::VectorXd& log_params) const;

  /// Monotone counter bumped whenever the factorization is rebuilt from
  /// scratch (hyperparameter changes); lets caches detect invalidation.
  std::uint64_t factorization_generation() const { return generation_; }
  std::uint64_t data_revision() const { return static_cast<std::uint64_t>(size()); }

  std::string summary() const;

  static constexpr double kSigmaFloorStd = 1e-12;

  // Internals shared with PilotPosteriorCache.
  const Eigen::MatrixXd& chol_lower() const { return chol_l_; }
  const Eigen::MatrixXd& inputs_std() const { return x_std_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  GpModel(const Standardizer& stdzr) : stdzr_(stdzr) {}

  void rebuild_factorization();
  void standardize_outputs();
  double to_std_threshold(double t) const { return (t - y_center_) / y_scale_; }

  Standardizer stdzr_;
  Eigen::MatrixXd x_std_;    // d x n standardized inputs
  Eigen::VectorXd y_raw_;    // native outputs
  Eigen::VectorXd y_std_;    // centered / unit-variance outputs
  double y_center_ = 0.0, y_scale_ = 1.0;
  KernelConfig kernel_;
  Eigen::MatrixXd chol_l_;   // lower Cholesky of K + nugget I
  Eigen::VectorXd alpha_;    // (K + nugget I)^{-1} y_std
  double lml_ = 0.0;
  bool constant_fallback_ = false;
  std::uint64_t generation_ = 0;
  GpFitOptions last_options_;
};

/// Cached posterior queries of one GpModel at a fixed pilot set. Maintains
/// V = L^{-1} K(X, U) so that appending a batch of b points costs O(b n m)
/// instead of the O(n^2 m) full solve; a full rebuild happens only when the
/// model's factorization generation changes.
class PilotPosteriorCache {
 public:
  PilotPosteriorCache(const GpModel& gp, const Eigen::MatrixXd& pilots_std, long max_points_hint);

  /// Brings the cache in sync with the model and writes standardized
  /// posterior moments for every pilot.
  void posterior_std(Eigen::VectorXd& mean_std, Eigen::VectorXd& var_std);

  /// Soft failure probabilities at all pilots for native threshold t.
  Eigen::VectorXd soft_failure_probs(double threshold);

 private:
  void rebuild();
  void extend(long old_n);

  const GpModel* gp_;
  Eigen::MatrixXd pilots_std_;  // d x m
  Eigen::MatrixXd v_;           // capacity x m, first n rows valid
  Eigen::VectorXd ssq_;         // per-pilot running sum of squares of V column
  Eigen::VectorXd kdiag_;       // prior variance at pilots
  long rows_valid_ = 0;
  std::uint64_t generation_ = ~0ull;
};

}  // namespace kdeais
