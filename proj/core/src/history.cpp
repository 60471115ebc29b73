#include "kdeais/history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "kdeais/math.hpp"

namespace kdeais {

ProposalHistory::ProposalHistory(std::shared_ptr<const InputDensity> p,
                                 std::shared_ptr<const Standardizer> stdzr)
    : p_(std::move(p)), stdzr_(std::move(stdzr)) {
  if (!p_ || !stdzr_) throw std::invalid_argument("ProposalHistory: null input density or standardizer");
}

void ProposalHistory::append_input_density(long count) {
  if (count < 1) throw std::invalid_argument("ProposalHistory: count >= 1 required");
  Entry e{std::nullopt, count};
  absorb_into_combined(e);
  entries_.push_back(std::move(e));
  total_ += count;
}

void ProposalHistory::append(MixtureProposal proposal, long count) {
  if (count < 1) throw std::invalid_argument("ProposalHistory: count >= 1 required");
  if (entries_.empty()) {
    throw std::invalid_argument("ProposalHistory: first entry must be the input-density marker");
  }
  Entry e{std::move(proposal), count};
  absorb_into_combined(e);
  entries_.push_back(std::move(e));
  total_ += count;
}

void ProposalHistory::absorb_into_combined(const Entry& e) {
  if (!combined_ok_) return;
  const double n_k = static_cast<double>(e.count);
  if (!e.proposal.has_value()) {
    p_count_ += n_k;
    return;
  }
  const MixtureProposal& q = *e.proposal;
  p_count_ += n_k * q.eta();
  if (q.eta() >= 1.0) return;  // no KDE share

  const WeightedKde& kde = *q.kde();
  if (!pilots_) {
    pilots_ = kde.pilots();
    bandwidth_ = kde.bandwidth();
    combined_weights_ = Eigen::VectorXd::Zero(pilots_->cols());
  } else if (pilots_ != kde.pilots() || bandwidth_ != kde.bandwidth()) {
    combined_ok_ = false;  // heterogeneous history; fall back to entry-wise sums
    return;
  }
  const double share = n_k * (1.0 - q.eta());
  const auto& idx = kde.active_indices();
  const auto& w = kde.active_weights();
  for (size_t i = 0; i < idx.size(); ++i) {
    combined_weights_[idx[i]] += share * w[static_cast<long>(i)];
  }
}

double ProposalHistory::combined_unnormalized_density(const Eigen::VectorXd& x_native) const {
  // N_tot * bar_q(x), all terms nonnegative: direct-space accumulation is stable.
  const double log_p = p_->log_density(x_native);
  double acc = log_p == kNegInf ? 0.0 : p_count_ * std::exp(log_p);
  if (pilots_) {
    const Eigen::VectorXd z = stdzr_->to_unit(x_native);
    const double inv2h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    const double d = static_cast<double>(pilots_->rows());
    const double log_norm = 0.5 * d * (kLogTwoPi + 2.0 * std::log(bandwidth_));
    const double scale = std::exp(stdzr_->log_jacobian() - log_norm);
    double kde_sum = 0.0;
    const long m = pilots_->cols();
    for (long j = 0; j < m; ++j) {
      const double wj = combined_weights_[j];
      if (wj == 0.0) continue;
      kde_sum += wj * std::exp(-(pilots_->col(j) - z).squaredNorm() * inv2h2);
    }
    acc += kde_sum * scale;
  }
  return acc;
}

double ProposalHistory::log_bar_density(const Eigen::VectorXd& x_native) const {
  if (entries_.empty()) throw std::invalid_argument("ProposalHistory: empty history");
  if (combined_ok_) {
    const double v = combined_unnormalized_density(x_native);
    return v > 0.0 ? std::log(v) - std::log(static_cast<double>(total_)) : kNegInf;
  }
  double acc = kNegInf;
  for (const auto& e : entries_) {
    const double log_q = e.proposal.has_value() ? e.proposal->log_density(x_native)
                                                : p_->log_density(x_native);
    acc = log_add(acc, std::log(static_cast<double>(e.count)) + log_q);
  }
  return acc - std::log(static_cast<double>(total_));
}

Eigen::VectorXd ProposalHistory::log_bar_density_batch(const Eigen::MatrixXd& x_native) const {
  const long q = x_native.cols();
  Eigen::VectorXd out(q);
  if (!combined_ok_ || !pilots_) {
    for (long i = 0; i < q; ++i) out[i] = log_bar_density(x_native.col(i));
    return out;
  }

  // Collapsed path: one tiled pass, GEMM for cross products then a vectorized
  // exp. Kernel exponents are <= 0 so direct-space sums cannot overflow.
  const Eigen::MatrixXd z = stdzr_->to_unit_cols(x_native);
  const double inv2h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  const double d = static_cast<double>(pilots_->rows());
  const double log_norm = 0.5 * d * (kLogTwoPi + 2.0 * std::log(bandwidth_));
  const double scale = std::exp(stdzr_->log_jacobian() - log_norm);
  const double log_total = std::log(static_cast<double>(total_));

  // Pack active pilots once (most components can be inactive late in a run).
  std::vector<long> active;
  active.reserve(static_cast<size_t>(combined_weights_.size()));
  for (long j = 0; j < combined_weights_.size(); ++j) {
    if (combined_weights_[j] > 0.0) active.push_back(j);
  }
  const long na = static_cast<long>(active.size());
  Eigen::MatrixXd u(pilots_->rows(), na);
  Eigen::VectorXd w(na);
  for (long i = 0; i < na; ++i) {
    u.col(i) = pilots_->col(active[static_cast<size_t>(i)]);
    w[i] = combined_weights_[active[static_cast<size_t>(i)]];
  }
  const Eigen::VectorXd un = u.colwise().squaredNorm().transpose();

  Eigen::VectorXd kde_sum = Eigen::VectorXd::Zero(q);
  constexpr long kQueryTile = 256;
  constexpr long kPilotTile = 8192;
  Eigen::MatrixXd block;
  for (long q0 = 0; q0 < q; q0 += kQueryTile) {
    const long qn = std::min(kQueryTile, q - q0);
    const auto zt = z.middleCols(q0, qn);
    const Eigen::VectorXd zn = zt.colwise().squaredNorm().transpose();
    for (long p0 = 0; p0 < na; p0 += kPilotTile) {
      const long pn = std::min(kPilotTile, na - p0);
      block.resize(pn, qn);
      block.noalias() = u.middleCols(p0, pn).transpose() * zt;
      block = (2.0 * block).colwise() - un.segment(p0, pn);
      block = block.rowwise() - zn.transpose();
      block.array() = (block.array() * inv2h2).exp();
      kde_sum.segment(q0, qn).noalias() += block.transpose() * w.segment(p0, pn);
    }
  }

  for (long i = 0; i < q; ++i) {
    const double log_p = p_->log_density(x_native.col(i));
    const double acc = (log_p == kNegInf ? 0.0 : p_count_ * std::exp(log_p)) + kde_sum[i] * scale;
    out[i] = acc > 0.0 ? std::log(acc) - log_total : kNegInf;
  }
  return out;
}

Eigen::MatrixXd ProposalHistory::sample_proportional(std::mt19937_64& rng, long m) const {
  if (entries_.empty()) throw std::invalid_argument("ProposalHistory: empty history");
  if (m < 1) throw std::invalid_argument("ProposalHistory: m >= 1 required");

  // Largest-remainder allocation of m draws across entries.
  const long k = entry_count();
  std::vector<long> alloc(static_cast<size_t>(k), 0);
  std::vector<std::pair<double, long>> remainders;
  long assigned = 0;
  for (long i = 0; i < k; ++i) {
    const double exact = static_cast<double>(m) * static_cast<double>(entries_[static_cast<size_t>(i)].count) /
                         static_cast<double>(total_);
    alloc[static_cast<size_t>(i)] = static_cast<long>(std::floor(exact));
    assigned += alloc[static_cast<size_t>(i)];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (long i = 0; assigned < m; ++i, ++assigned) {
    alloc[static_cast<size_t>(remainders[static_cast<size_t>(i) % remainders.size()].second)] += 1;
  }

  Eigen::MatrixXd out(p_->dim(), m);
  long col = 0;
  for (long i = 0; i < k; ++i) {
    const Entry& e = entries_[static_cast<size_t>(i)];
    for (long j = 0; j < alloc[static_cast<size_t>(i)]; ++j, ++col) {
      out.col(col) = e.proposal.has_value() ? e.proposal->sample_one(rng) : p_->sample(rng, 1).col(0);
    }
  }
  return out;
}

}  // namespace kdeais
