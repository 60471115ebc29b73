#include "kdeais/mixture.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kdeais/math.hpp"

namespace kdeais {

MixtureProposal::MixtureProposal(std::optional<WeightedKde> kde, double eta,
                                 std::shared_ptr<const InputDensity> p,
                                 std::shared_ptr<const Standardizer> stdzr)
    : kde_(std::move(kde)), eta_(eta), p_(std::move(p)), stdzr_(std::move(stdzr)) {
  if (!(eta_ >= 0.0 && eta_ <= 1.0)) throw std::invalid_argument("MixtureProposal: eta must lie in [0, 1]");
  if (!p_ || !stdzr_) throw std::invalid_argument("MixtureProposal: null input density or standardizer");
  if (!kde_.has_value() && eta_ != 1.0) {
    throw std::invalid_argument("MixtureProposal: KDE may only be absent when eta == 1");
  }
  if (kde_.has_value() && kde_->dim() != p_->dim()) {
    throw std::invalid_argument("MixtureProposal: KDE/input density dimension mismatch");
  }
}

double MixtureProposal::log_density(const Eigen::VectorXd& x_native) const {
  const double log_p = p_->log_density(x_native);
  if (eta_ >= 1.0) return log_p;
  const double log_kde_native =
      kde_->log_density(stdzr_->to_unit(x_native)) + stdzr_->log_jacobian();
  const double a = std::log1p(-eta_) + log_kde_native;
  if (eta_ <= 0.0) return a;
  return log_add(a, std::log(eta_) + log_p);
}

Eigen::VectorXd MixtureProposal::sample_one(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool kde_branch = unif(rng) < 1.0 - eta_;
  if (!kde_branch) return p_->sample(rng, 1).col(0);

  for (int attempt = 0; attempt < 100; ++attempt) {
    const Eigen::VectorXd x = stdzr_->to_native(kde_->sample(rng));
    if (p_->in_support(x)) return x;
  }
  // Clamp the final attempt onto the support box.
  Eigen::VectorXd x = stdzr_->to_native(kde_->sample(rng));
  for (int i = 0; i < p_->dim(); ++i) {
    const Marginal& m = p_->marginal(i);
    if (std::isfinite(m.support_lo())) x[i] = std::max(x[i], m.support_lo());
    if (std::isfinite(m.support_hi())) x[i] = std::min(x[i], m.support_hi());
    if (m.kind() == MarginalKind::kLognormal && x[i] <= 0.0) {
      x[i] = std::numeric_limits<double>::min();
    }
  }
  return x;
}

Eigen::MatrixXd MixtureProposal::sample(std::mt19937_64& rng, long batch) const {
  if (batch < 1) throw std::invalid_argument("MixtureProposal::sample: batch >= 1 required");
  Eigen::MatrixXd out(p_->dim(), batch);
  for (long j = 0; j < batch; ++j) out.col(j) = sample_one(rng);
  return out;
}

}  // namespace kdeais
