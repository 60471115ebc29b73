#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "kdeais/history.hpp"

namespace kdeais {

/// Scalar field over native input points (surrogate mean, soft failure
/// probability, or an exact stub in tests).
using PointFn = std::function<double(const Eigen::VectorXd&)>;

/// Naive Monte Carlo: (1/N) sum 1{y_i > t} over draws from p.
double naive_mc(std::span<const LabeledSample> samples, double t);

/// Single-proposal importance sampling: (1/M) sum 1{y_i > t} p(x_i)/q(x_i),
/// weights computed in log space. Throws numerical_error when the proposal
/// density vanishes at a sample (absolute continuity violated).
double is_estimate(std::span<const LabeledSample> samples, const PointFn& log_q,
                   const InputDensity& p, double t);

/// bar_q(x) as a density value (count-weighted mixture over the history).
double mixture_density_bar_q(const ProposalHistory& history, const Eigen::VectorXd& x);

/// Deterministic-mixture (balance heuristic) estimator:
/// (1/N_tot) sum 1{y_i > t} p(x_i)/bar_q(x_i).
double mis_estimate(std::span<const LabeledSample> samples, const ProposalHistory& history, double t);

/// Same estimator with precomputed log bar_q values (single code path for
/// the arithmetic; the wrapper above evaluates the history densities).
double mis_estimate_with_log_bar_q(std::span<const LabeledSample> samples,
                                   const Eigen::VectorXd& log_bar_q, const InputDensity& p,
                                   long n_tot, double t);

struct MfMisResult {
  double estimate = 0.0;        // clamped at 0 from below
  double raw = 0.0;             // unclamped surrogate + correction sum
  double surrogate_term = 0.0;
  double correction_term = 0.0;
};

/// Multifidelity MIS estimator: a cheap surrogate-indicator term over
/// surrogate-only samples plus an oracle-based correction over the expensive
/// samples too. The surrogate sample set must be drawn with the same mixture
/// proportions as the expensive set (use ProposalHistory::sample_proportional).
/// An empty surrogate set falls back to plain MIS.
MfMisResult mf_mis_estimate(const Eigen::MatrixXd& surrogate_points,
                            std::span<const LabeledSample> expensive,
                            const ProposalHistory& history, const PointFn& surrogate_mean,
                            double t);

/// Precomputed-weights variant: log bar_q at surrogate points and at the
/// expensive samples, surrogate means at both sets.
MfMisResult mf_mis_estimate_prepared(const Eigen::MatrixXd& surrogate_points,
                                     const Eigen::VectorXd& log_bar_q_surrogate,
                                     const Eigen::VectorXd& surrogate_mean_at_points,
                                     std::span<const LabeledSample> expensive,
                                     const Eigen::VectorXd& log_bar_q_expensive,
                                     const Eigen::VectorXd& surrogate_mean_at_expensive,
                                     const InputDensity& p, long n_tot, double t);

/// Unbiased surrogate-error estimator
/// r_hat = P_hat + E_hat[pi] - 2 E_hat[pi 1_F], all three terms MIS-weighted
/// with the shared weights w_i = p(x_i)/bar_q(x_i); reuses existing labels.
double surrogate_error_estimate(std::span<const LabeledSample> samples,
                                const ProposalHistory& history, const PointFn& soft_failure_prob,
                                double t);

double surrogate_error_estimate_prepared(std::span<const LabeledSample> samples,
                                         const Eigen::VectorXd& log_bar_q,
                                         const Eigen::VectorXd& pi_at_samples,
                                         const InputDensity& p, long n_tot, double t);

}  // namespace kdeais
