#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "kdeais/marginal.hpp"

namespace kdeais {

/// Known input density p(x) as a product of independent univariate marginals.
/// Immutable after construction; point sets are stored column-wise (d x n).
class InputDensity {
 public:
  explicit InputDensity(std::vector<Marginal> marginals);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const Marginal& marginal(int i) const { return marginals_[static_cast<size_t>(i)]; }
  const std::vector<Marginal>& marginals() const { return marginals_; }

  /// log p(x) = sum_i log p_i(x_i); -inf outside the support.
  /// Throws std::invalid_argument on dimension mismatch.
  double log_density(const Eigen::VectorXd& x) const;

  bool in_support(const Eigen::VectorXd& x) const;

  /// n i.i.d. draws from p; deterministic given the stream state.
  Eigen::MatrixXd sample(std::mt19937_64& rng, long n) const;

  bool operator==(const InputDensity& other) const { return marginals_ == other.marginals_; }

 private:
  std::vector<Marginal> marginals_;
};

}  // namespace kdeais
