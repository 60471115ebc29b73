#pragma once

#include <Eigen/Core>

#include "kdeais/input_density.hpp"

namespace kdeais {

/// Per-dimension affine map between native units and standardized coordinates.
/// Bounded marginals map their support onto [0, 1]; unbounded ones use the
/// mean +- 4 sd box. Kernel distances (GP) and the KDE bandwidth both operate
/// in these coordinates, so one bandwidth is meaningful across experiments
/// whose native scales differ by many orders of magnitude.
class Standardizer {
 public:
  static Standardizer from_input_density(const InputDensity& p);

  Standardizer(Eigen::VectorXd offset, Eigen::VectorXd scale);

  int dim() const { return static_cast<int>(offset_.size()); }

  Eigen::VectorXd to_unit(const Eigen::VectorXd& x_native) const;
  Eigen::VectorXd to_native(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd to_unit_cols(const Eigen::MatrixXd& x_native) const;
  Eigen::MatrixXd to_native_cols(const Eigen::MatrixXd& z) const;

  /// log |det d z / d x| = -sum_i log scale_i. A density q_z in standardized
  /// coordinates transforms to native units as log q_x = log q_z + log_jacobian().
  double log_jacobian() const { return log_jacobian_; }

  const Eigen::VectorXd& offset() const { return offset_; }
  const Eigen::VectorXd& scale() const { return scale_; }

 private:
  Eigen::VectorXd offset_, scale_;
  double log_jacobian_ = 0.0;
};

}  // namespace kdeais
