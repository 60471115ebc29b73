#include "kdeais/input_density.hpp"

#include <stdexcept>

#include "kdeais/math.hpp"

namespace kdeais {

InputDensity::InputDensity(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("InputDensity: needs at least one marginal");
}

double InputDensity::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("InputDensity::log_density: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double li = marginals_[static_cast<size_t>(i)].log_pdf(x[i]);
    if (li == kNegInf) return kNegInf;
    total += li;
  }
  return total;
}

bool InputDensity::in_support(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("InputDensity::in_support: dimension mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (!marginals_[static_cast<size_t>(i)].in_support(x[i])) return false;
  }
  return true;
}

Eigen::MatrixXd InputDensity::sample(std::mt19937_64& rng, long n) const {
  if (n < 1) throw std::invalid_argument("InputDensity::sample: n >= 1 required");
  Eigen::MatrixXd out(dim(), n);
  for (long j = 0; j < n; ++j) {
    for (int i = 0; i < dim(); ++i) {
      out(i, j) = marginals_[static_cast<size_t>(i)].sample(rng);
    }
  }
  return out;
}

}  // namespace kdeais
