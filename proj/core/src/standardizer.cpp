#include "kdeais/standardizer.hpp"

#include <cmath>
#include <stdexcept>

namespace kdeais {

Standardizer::Standardizer(Eigen::VectorXd offset, Eigen::VectorXd scale)
    : offset_(std::move(offset)), scale_(std::move(scale)) {
  if (offset_.size() != scale_.size()) {
    throw std::invalid_argument("Standardizer: offset/scale size mismatch");
  }
  if ((scale_.array() <= 0.0).any()) {
    throw std::invalid_argument("Standardizer: scales must be positive");
  }
  log_jacobian_ = -scale_.array().log().sum();
}

Standardizer Standardizer::from_input_density(const InputDensity& p) {
  const int d = p.dim();
  Eigen::VectorXd offset(d), scale(d);
  for (int i = 0; i < d; ++i) {
    const Marginal& m = p.marginal(i);
    if (m.bounded()) {
      offset[i] = m.support_lo();
      scale[i] = m.support_hi() - m.support_lo();
    } else {
      offset[i] = m.mean() - 4.0 * m.sd();
      scale[i] = 8.0 * m.sd();
    }
  }
  return Standardizer(std::move(offset), std::move(scale));
}

Eigen::VectorXd Standardizer::to_unit(const Eigen::VectorXd& x_native) const {
  return (x_native - offset_).cwiseQuotient(scale_);
}

Eigen::VectorXd Standardizer::to_native(const Eigen::VectorXd& z) const {
  return offset_ + z.cwiseProduct(scale_);
}

Eigen::MatrixXd Standardizer::to_unit_cols(const Eigen::MatrixXd& x_native) const {
  return ((x_native.colwise() - offset_).array().colwise() / scale_.array()).matrix();
}

Eigen::MatrixXd Standardizer::to_native_cols(const Eigen::MatrixXd& z) const {
  return ((z.array().colwise() * scale_.array()).colwise() + offset_.array()).matrix();
}

}  // namespace kdeais
