#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "kdeais/mixture.hpp"

namespace kdeais {

/// One expensive (or surrogate) sample with its generating proposal index.
struct LabeledSample {
  Eigen::VectorXd x;
  double y = 0.0;
  int proposal_index = 0;
};

/// Ordered list of (proposal snapshot, sample count) pairs defining the
/// empirical mixture bar_q(x) = sum_k (N_k / N_tot) q_k(x). The first entry
/// is the input-density marker ("p") for the seed design.
///
/// All snapshots produced within one run share the same pilot matrix and
/// bandwidth, in which case bar_q collapses to a single weighted KDE with the
/// count-accumulated weights plus one p(x) term; evaluation cost is then
/// independent of the history length. Heterogeneous histories (tests,
/// baselines) fall back to the entry-by-entry log-sum-exp.
class ProposalHistory {
 public:
  ProposalHistory(std::shared_ptr<const InputDensity> p, std::shared_ptr<const Standardizer> stdzr);

  /// Appends a pure input-density entry ("p"); required as the first entry
  /// and reused for degenerate-weights fallback iterations.
  void append_input_density(long count);

  /// Appends a mixture proposal snapshot.
  void append(MixtureProposal proposal, long count);

  long entry_count() const { return static_cast<long>(entries_.size()); }
  long total() const { return total_; }
  long count_of(int k) const { return entries_[static_cast<size_t>(k)].count; }
  bool entry_is_input_density(int k) const {
    return !entries_[static_cast<size_t>(k)].proposal.has_value();
  }
  const MixtureProposal& proposal_of(int k) const { return *entries_[static_cast<size_t>(k)].proposal; }
  const InputDensity& input_density() const { return *p_; }

  /// log bar_q(x): count-weighted mixture density, stable accumulation.
  double log_bar_density(const Eigen::VectorXd& x_native) const;

  /// Batched log bar_q over column-wise points; uses the collapsed
  /// shared-pilot representation when available.
  Eigen::VectorXd log_bar_density_batch(const Eigen::MatrixXd& x_native) const;

  /// M draws from bar_q with the entry allocation matching the count
  /// proportions N_k / N_tot exactly (largest-remainder rounding), per the
  /// equal-mixture-proportions precondition of the multifidelity estimator.
  Eigen::MatrixXd sample_proportional(std::mt19937_64& rng, long m) const;

  /// True when every snapshot shares one pilot matrix and bandwidth.
  bool collapsed() const { return combined_ok_; }

 private:
  struct Entry {
    std::optional<MixtureProposal> proposal;  // nullopt = input-density marker
    long count = 0;
  };

  void absorb_into_combined(const Entry& e);
  double combined_unnormalized_density(const Eigen::VectorXd& x_native) const;

  std::vector<Entry> entries_;
  std::shared_ptr<const InputDensity> p_;
  std::shared_ptr<const Standardizer> stdzr_;
  long total_ = 0;

  // Collapsed representation: N_tot * bar_q(x) = p_count_ * p(x) + J * sum_j A_j phi_h(z - u_j)
  // with J the standardized->native Jacobian factor.
  bool combined_ok_ = true;
  std::shared_ptr<const Eigen::MatrixXd> pilots_;
  double bandwidth_ = 0.0;
  double p_count_ = 0.0;             // N_0 + sum_k N_k eta_k
  Eigen::VectorXd combined_weights_;  // A_j = sum_k N_k (1 - eta_k) w_kj
};

}  // namespace kdeais
