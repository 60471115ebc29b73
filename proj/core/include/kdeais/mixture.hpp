#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <random>

#include "kdeais/input_density.hpp"
#include "kdeais/kde.hpp"
#include "kdeais/standardizer.hpp"

namespace kdeais {

/// Exploration mixture q(x) = (1 - eta) q_hat(x) + eta p(x) in native units.
/// The KDE branch lives in standardized coordinates; its density picks up the
/// Jacobian of the affine map. With eta == 1 the KDE may be absent (the
/// pure-exploration fallback used when every pilot weight degenerates to 0).
class MixtureProposal {
 public:
  MixtureProposal(std::optional<WeightedKde> kde, double eta,
                  std::shared_ptr<const InputDensity> p,
                  std::shared_ptr<const Standardizer> stdzr);

  double eta() const { return eta_; }
  const std::optional<WeightedKde>& kde() const { return kde_; }
  const InputDensity& input_density() const { return *p_; }
  const Standardizer& standardizer() const { return *stdzr_; }

  /// log q(x) via a stable two-term log-sum-exp. This is the stored density:
  /// no renormalization is applied for samples rejected at the domain
  /// boundary (deliberate approximation, tolerated by the MIS weights).
  double log_density(const Eigen::VectorXd& x_native) const;

  /// One mixture draw: Bernoulli(1 - eta) chooses the KDE branch, otherwise
  /// p. KDE draws falling outside the support of p are redrawn (at most 100
  /// attempts) and finally clamped to the support box.
  Eigen::VectorXd sample_one(std::mt19937_64& rng) const;

  /// Column-wise batch of independent draws.
  Eigen::MatrixXd sample(std::mt19937_64& rng, long batch) const;

 private:
  std::optional<WeightedKde> kde_;
  double eta_;
  std::shared_ptr<const InputDensity> p_;
  std::shared_ptr<const Standardizer> stdzr_;
};

}  // namespace kdeais
