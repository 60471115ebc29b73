#include "kdeais/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "kdeais/errors.hpp"
#include "kdeais/math.hpp"

namespace kdeais {

namespace {

// Importance weight p/qbar with a single exponentiation; failures (y > t)
// with vanishing mixture density violate absolute continuity.
double weight_from_logs(double log_p, double log_q, bool failed) {
  if (log_q == kNegInf) {
    if (log_p == kNegInf && !failed) return 0.0;
    throw numerical_error("importance weight: proposal density is zero at a sample");
  }
  if (log_p == kNegInf) return 0.0;
  return std::exp(log_p - log_q);
}

void check_history_consistency(std::span<const LabeledSample> samples,
                               const ProposalHistory& history) {
  if (history.total() != static_cast<long>(samples.size())) {
    throw std::invalid_argument("history counts do not match the number of samples");
  }
  std::vector<long> seen(static_cast<size_t>(history.entry_count()), 0);
  for (const auto& s : samples) {
    if (s.proposal_index < 0 || s.proposal_index >= history.entry_count()) {
      throw std::invalid_argument("sample references an unknown proposal index");
    }
    ++seen[static_cast<size_t>(s.proposal_index)];
  }
  for (int k = 0; k < history.entry_count(); ++k) {
    if (seen[static_cast<size_t>(k)] != history.count_of(k)) {
      throw std::invalid_argument("history counts do not match sample multiplicities");
    }
  }
}

}  // namespace

double naive_mc(std::span<const LabeledSample> samples, double t) {
  if (samples.empty()) throw std::invalid_argument("naive_mc: empty sample set");
  long failures = 0;
  for (const auto& s : samples) failures += s.y > t ? 1 : 0;
  return static_cast<double>(failures) / static_cast<double>(samples.size());
}

double is_estimate(std::span<const LabeledSample> samples, const PointFn& log_q,
                   const InputDensity& p, double t) {
  if (samples.empty()) throw std::invalid_argument("is_estimate: empty sample set");
  double acc = 0.0;
  for (const auto& s : samples) {
    if (s.y <= t) continue;
    acc += weight_from_logs(p.log_density(s.x), log_q(s.x), true);
  }
  return acc / static_cast<double>(samples.size());
}

double mixture_density_bar_q(const ProposalHistory& history, const Eigen::VectorXd& x) {
  const double lv = history.log_bar_density(x);
  return lv == kNegInf ? 0.0 : std::exp(lv);
}

double mis_estimate_with_log_bar_q(std::span<const LabeledSample> samples,
                                   const Eigen::VectorXd& log_bar_q, const InputDensity& p,
                                   long n_tot, double t) {
  if (samples.empty()) throw std::invalid_argument("mis_estimate: empty sample set");
  if (log_bar_q.size() != static_cast<long>(samples.size())) {
    throw std::invalid_argument("mis_estimate: log_bar_q size mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].y <= t) continue;
    acc += weight_from_logs(p.log_density(samples[i].x), log_bar_q[static_cast<long>(i)], true);
  }
  return acc / static_cast<double>(n_tot);
}

double mis_estimate(std::span<const LabeledSample> samples, const ProposalHistory& history,
                    double t) {
  check_history_consistency(samples, history);
  Eigen::VectorXd log_q(static_cast<long>(samples.size()));
  for (size_t i = 0; i < samples.size(); ++i) {
    log_q[static_cast<long>(i)] = history.log_bar_density(samples[i].x);
  }
  return mis_estimate_with_log_bar_q(samples, log_q, history.input_density(), history.total(), t);
}

MfMisResult mf_mis_estimate_prepared(const Eigen::MatrixXd& surrogate_points,
                                     const Eigen::VectorXd& log_bar_q_surrogate,
                                     const Eigen::VectorXd& surrogate_mean_at_points,
                                     std::span<const LabeledSample> expensive,
                                     const Eigen::VectorXd& log_bar_q_expensive,
                                     const Eigen::VectorXd& surrogate_mean_at_expensive,
                                     const InputDensity& p, long n_tot, double t) {
  MfMisResult out;
  const long m_tot = surrogate_points.cols();
  if (m_tot == 0) {
    // Fall back to plain MIS over the expensive samples.
    out.correction_term =
        mis_estimate_with_log_bar_q(expensive, log_bar_q_expensive, p, n_tot, t);
    out.raw = out.correction_term;
    out.estimate = std::max(0.0, out.raw);
    return out;
  }

  double sur = 0.0;
  for (long i = 0; i < m_tot; ++i) {
    if (surrogate_mean_at_points[i] <= t) continue;
    sur += weight_from_logs(p.log_density(surrogate_points.col(i)), log_bar_q_surrogate[i], false);
  }
  out.surrogate_term = sur / static_cast<double>(m_tot);

  double corr = 0.0;
  for (size_t i = 0; i < expensive.size(); ++i) {
    const double zi = expensive[i].y > t ? 1.0 : 0.0;
    const double si = surrogate_mean_at_expensive[static_cast<long>(i)] > t ? 1.0 : 0.0;
    if (zi == si) continue;
    corr += (zi - si) * weight_from_logs(p.log_density(expensive[i].x),
                                         log_bar_q_expensive[static_cast<long>(i)], zi > 0.0);
  }
  out.correction_term = corr / static_cast<double>(n_tot);

  out.raw = out.surrogate_term + out.correction_term;
  out.estimate = std::max(0.0, out.raw);
  return out;
}

MfMisResult mf_mis_estimate(const Eigen::MatrixXd& surrogate_points,
                            std::span<const LabeledSample> expensive,
                            const ProposalHistory& history, const PointFn& surrogate_mean,
                            double t) {
  check_history_consistency(expensive, history);
  const long m_tot = surrogate_points.cols();
  Eigen::VectorXd log_q_sur(m_tot), mean_sur(m_tot);
  for (long i = 0; i < m_tot; ++i) {
    log_q_sur[i] = history.log_bar_density(surrogate_points.col(i));
    mean_sur[i] = surrogate_mean(surrogate_points.col(i));
  }
  const long n = static_cast<long>(expensive.size());
  Eigen::VectorXd log_q_exp(n), mean_exp(n);
  for (long i = 0; i < n; ++i) {
    log_q_exp[i] = history.log_bar_density(expensive[static_cast<size_t>(i)].x);
    mean_exp[i] = surrogate_mean(expensive[static_cast<size_t>(i)].x);
  }
  return mf_mis_estimate_prepared(surrogate_points, log_q_sur, mean_sur, expensive, log_q_exp,
                                  mean_exp, history.input_density(), history.total(), t);
}

double surrogate_error_estimate_prepared(std::span<const LabeledSample> samples,
                                         const Eigen::VectorXd& log_bar_q,
                                         const Eigen::VectorXd& pi_at_samples,
                                         const InputDensity& p, long n_tot, double t) {
  if (samples.empty()) throw std::invalid_argument("surrogate_error_estimate: empty sample set");
  double p_hat = 0.0, e_pi = 0.0, e_pi_f = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const bool failed = samples[i].y > t;
    const double w = weight_from_logs(p.log_density(samples[i].x),
                                      log_bar_q[static_cast<long>(i)], failed);
    const double pi = pi_at_samples[static_cast<long>(i)];
    if (failed) {
      p_hat += w;
      e_pi_f += pi * w;
    }
    e_pi += pi * w;
  }
  // Single division keeps the three-term identities exact in floating point.
  return (p_hat + e_pi - 2.0 * e_pi_f) / static_cast<double>(n_tot);
}

double surrogate_error_estimate(std::span<const LabeledSample> samples,
                                const ProposalHistory& history, const PointFn& soft_failure_prob,
                                double t) {
  check_history_consistency(samples, history);
  const long n = static_cast<long>(samples.size());
  Eigen::VectorXd log_q(n), pi(n);
  for (long i = 0; i < n; ++i) {
    log_q[i] = history.log_bar_density(samples[static_cast<size_t>(i)].x);
    pi[i] = soft_failure_prob(samples[static_cast<size_t>(i)].x);
  }
  return surrogate_error_estimate_prepared(samples, log_q, pi, history.input_density(),
                                           history.total(), t);
}

}  // namespace kdeais
