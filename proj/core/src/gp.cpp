#include "kdeais/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kdeais/errors.hpp"
#include "kdeais/math.hpp"

namespace kdeais {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

// Fills `out` (n x m) with kernel values k(A_i, B_j) without allocating an
// extra n x m temporary; A, B are column-wise standardized point sets.
void kernel_cross_into(const KernelConfig& k, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       Eigen::Ref<Eigen::MatrixXd> out) {
  const Eigen::VectorXd inv_ls = k.lengthscales.cwiseInverse();
  const Eigen::MatrixXd as = inv_ls.asDiagonal() * A;
  const Eigen::MatrixXd bs = inv_ls.asDiagonal() * B;
  const Eigen::VectorXd an = as.colwise().squaredNorm();
  const Eigen::VectorXd bn = bs.colwise().squaredNorm();
  out.noalias() = as.transpose() * bs;
  out = (-2.0 * out).colwise() + an;
  out = out.rowwise() + bn.transpose();
  out = out.cwiseMax(0.0);  // squared scaled distances
  if (k.family == KernelFamily::kSquaredExponential) {
    out.array() = (out.array() * -0.5).exp() * k.signal_variance;
  } else {
    const auto r = (out.array() * 5.0).sqrt();  // sqrt(5) * scaled distance
    out.array() = k.signal_variance * (1.0 + r + r * r / 3.0) * (-r).exp();
  }
}

struct NelderMeadResult {
  Eigen::VectorXd best_x;
  double best_f = kInf;
};

// Minimizes f over R^dim from x0; tracks the best point over every
// evaluation, including the initial simplex.
template <typename F>
NelderMeadResult nelder_mead(const F& f, const Eigen::VectorXd& x0, double step, int max_evals) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> fs;
  NelderMeadResult result;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    ++evals;
    if (v < result.best_f) {
      result.best_f = v;
      result.best_x = x;
    }
    return v;
  };

  xs.push_back(x0);
  fs.push_back(eval(x0));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xi = x0;
    xi[i] += step;
    xs.push_back(xi);
    fs.push_back(eval(xi));
  }

  auto order = [&] {
    std::vector<int> idx(xs.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> xs2;
    std::vector<double> fs2;
    for (int i : idx) {
      xs2.push_back(xs[static_cast<size_t>(i)]);
      fs2.push_back(fs[static_cast<size_t>(i)]);
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };

  while (evals < max_evals) {
    order();
    if (std::abs(fs.back() - fs.front()) < 1e-9 * (1.0 + std::abs(fs.front()))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[static_cast<size_t>(i)];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - xs.back());
    const double fr = eval(xr);
    if (fr < fs.front()) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs.back());
      const double fe = eval(xe);
      if (fe < fr) {
        xs.back() = xe;
        fs.back() = fe;
      } else {
        xs.back() = xr;
        fs.back() = fr;
      }
    } else if (fr < fs[xs.size() - 2]) {
      xs.back() = xr;
      fs.back() = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (xs.back() - centroid);
      const double fc = eval(xc);
      if (fc < fs.back()) {
        xs.back() = xc;
        fs.back() = fc;
      } else {
        for (size_t i = 1; i < xs.size(); ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = eval(xs[i]);
          if (evals >= max_evals) break;
        }
      }
    }
  }
  return result;
}

}  // namespace

void KernelConfig::validate(int dim) const {
  if (lengthscales.size() != dim) throw std::invalid_argument("KernelConfig: lengthscale count != dim");
  if ((lengthscales.array() <= 0.0).any()) throw std::invalid_argument("KernelConfig: lengthscales must be > 0");
  if (!(signal_variance > 0.0)) throw std::invalid_argument("KernelConfig: signal_variance must be > 0");
  if (nugget < 0.0) throw std::invalid_argument("KernelConfig: nugget must be >= 0");
}

double KernelConfig::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double d2 = ((a - b).cwiseQuotient(lengthscales)).squaredNorm();
  if (family == KernelFamily::kSquaredExponential) {
    return signal_variance * std::exp(-0.5 * d2);
  }
  const double r = kSqrt5 * std::sqrt(d2);
  return signal_variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

Eigen::MatrixXd KernelConfig::cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const {
  Eigen::MatrixXd out(A.cols(), B.cols());
  kernel_cross_into(*this, A, B, out);
  return out;
}

GpModel GpModel::fit(const Eigen::MatrixXd& x_native, const Eigen::VectorXd& y,
                     const Standardizer& stdzr, const GpFitOptions& options) {
  if (x_native.cols() != y.size()) throw std::invalid_argument("GpModel::fit: X/y size mismatch");
  if (y.size() < 2) throw std::invalid_argument("GpModel::fit: needs at least 2 points");
  if (x_native.rows() != stdzr.dim()) throw std::invalid_argument("GpModel::fit: dimension mismatch");
  if (!x_native.allFinite() || !y.allFinite()) throw std::invalid_argument("GpModel::fit: non-finite data");

  GpModel gp(stdzr);
  gp.x_std_ = stdzr.to_unit_cols(x_native);
  gp.y_raw_ = y;
  gp.last_options_ = options;
  gp.standardize_outputs();
  if (gp.constant_fallback_) return gp;
  gp.refit_hyperparameters(options);
  return gp;
}

void GpModel::standardize_outputs() {
  y_center_ = y_raw_.mean();
  const double var = (y_raw_.array() - y_center_).square().mean();
  constant_fallback_ = !(var > 0.0);
  y_scale_ = constant_fallback_ ? 1.0 : std::sqrt(var);
  y_std_ = (y_raw_.array() - y_center_) / y_scale_;
}

double GpModel::log_marginal_likelihood_at(const Eigen::VectorXd& log_params) const {
  const int d = dim();
  if (log_params.size() != d + 1) throw std::invalid_argument("log_marginal_likelihood_at: bad size");
  KernelConfig k;
  k.family = kernel_.family;
  k.lengthscales = log_params.head(d).array().exp().matrix();
  k.signal_variance = std::exp(log_params[d]);
  k.nugget = kernel_.nugget > 0.0 ? kernel_.nugget : last_options_.nugget;

  const long n = size();
  Eigen::MatrixXd kmat = k.cross(x_std_, x_std_);
  kmat.diagonal().array() += k.nugget;
  Eigen::LLT<Eigen::MatrixXd> llt(kmat);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd a = llt.solve(y_std_);
  const double logdet = llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y_std_.dot(a) - logdet - 0.5 * static_cast<double>(n) * kLogTwoPi;
}

void GpModel::refit_hyperparameters(const GpFitOptions& options) {
  last_options_ = options;
  standardize_outputs();
  if (constant_fallback_) return;

  const int d = dim();
  kernel_.family = options.family;
  kernel_.nugget = options.nugget;
  if (kernel_.lengthscales.size() != d) {
    kernel_.lengthscales = Eigen::VectorXd::Constant(d, 0.3);
    kernel_.signal_variance = 1.0;
  }

  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(d + 1, std::log(1e-4));
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(d + 1, std::log(1e4));
  auto objective = [&](const Eigen::VectorXd& p) {
    if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) return 1e100;
    const double lml = log_marginal_likelihood_at(p);
    return lml == kNegInf ? 1e100 : -lml;
  };

  // Start 1 is the incumbent (warm start); the rest are drawn log-uniform.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u_ls(std::log(0.03), std::log(3.0));
  std::uniform_real_distribution<double> u_sv(std::log(0.05), std::log(8.0));
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd p(d + 1);
    p.head(d) = kernel_.lengthscales.array().log();
    p[d] = std::log(kernel_.signal_variance);
    starts.push_back(p);
  }
  for (int s = 1; s < std::max(1, options.multistarts); ++s) {
    Eigen::VectorXd p(d + 1);
    for (int i = 0; i < d; ++i) p[i] = u_ls(rng);
    p[d] = u_sv(rng);
    starts.push_back(p);
  }

  NelderMeadResult best;
  for (const auto& s : starts) {
    const auto r = nelder_mead(objective, s, 0.35, options.max_evals_per_start);
    if (r.best_f < best.best_f) best = r;
  }
  if (best.best_f >= 1e100) throw numerical_error("GpModel: every hyperparameter start failed to factorize");

  kernel_.lengthscales = best.best_x.head(d).array().exp().matrix();
  kernel_.signal_variance = std::exp(best.best_x[d]);
  kernel_.nugget = options.nugget;
  rebuild_factorization();
}

void GpModel::rebuild_factorization() {
  const long n = size();
  Eigen::MatrixXd kmat = kernel_.cross(x_std_, x_std_);
  double nugget = std::max(kernel_.nugget, last_options_.nugget);
  for (;;) {
    Eigen::MatrixXd kj = kmat;
    kj.diagonal().array() += nugget;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success) {
      chol_l_ = llt.matrixL();
      alpha_ = llt.solve(y_std_);
      const double logdet = chol_l_.diagonal().array().log().sum();
      lml_ = -0.5 * y_std_.dot(alpha_) - logdet - 0.5 * static_cast<double>(n) * kLogTwoPi;
      kernel_.nugget = nugget;
      ++generation_;
      return;
    }
    nugget *= 10.0;
    if (nugget > last_options_.max_nugget) {
      throw numerical_error("GpModel: kernel matrix not positive definite after jitter escalation");
    }
  }
}

void GpModel::append(const Eigen::MatrixXd& x_native, const Eigen::VectorXd& y) {
  if (x_native.cols() != y.size()) throw std::invalid_argument("GpModel::append: X/y size mismatch");
  if (x_native.rows() != dim()) throw std::invalid_argument("GpModel::append: dimension mismatch");
  const long old_n = size();
  const long b = x_native.cols();

  const Eigen::MatrixXd z = stdzr_.to_unit_cols(x_native);
  x_std_.conservativeResize(Eigen::NoChange, old_n + b);
  x_std_.rightCols(b) = z;
  y_raw_.conservativeResize(old_n + b);
  y_raw_.tail(b) = y;

  if (constant_fallback_) {
    standardize_outputs();
    if (!constant_fallback_) refit_hyperparameters(last_options_);
    return;
  }

  // Extend the Cholesky factor in place; the first old_n rows are unchanged.
  const Eigen::MatrixXd k12 = kernel_.cross(x_std_.leftCols(old_n), z);  // old_n x b
  Eigen::MatrixXd k22 = kernel_.cross(z, z);
  k22.diagonal().array() += kernel_.nugget;

  const Eigen::MatrixXd l21t =
      chol_l_.topLeftCorner(old_n, old_n).triangularView<Eigen::Lower>().solve(k12);  // old_n x b
  Eigen::MatrixXd s = k22 - l21t.transpose() * l21t;
  Eigen::LLT<Eigen::MatrixXd> llt_s(s);
  if (llt_s.info() != Eigen::Success) {
    // Duplicate-ish points; escalate the nugget and rebuild from scratch.
    kernel_.nugget = std::max(kernel_.nugget, last_options_.nugget) * 10.0;
    if (kernel_.nugget > last_options_.max_nugget) {
      throw numerical_error("GpModel: kernel matrix not positive definite after jitter escalation");
    }
    standardize_outputs();
    rebuild_factorization();
    return;
  }

  chol_l_.conservativeResize(old_n + b, old_n + b);
  chol_l_.topRightCorner(old_n, b).setZero();
  chol_l_.bottomLeftCorner(b, old_n) = l21t.transpose();
  chol_l_.bottomRightCorner(b, b) = llt_s.matrixL();

  // Outputs were standardized with the original center/scale; keep that frame
  // (predictions are de-standardized, so the frame choice is internal).
  y_std_.conservativeResize(old_n + b);
  y_std_.tail(b) = (y.array() - y_center_) / y_scale_;

  // alpha and the log marginal likelihood are refreshed with two O(n^2) solves.
  const Eigen::VectorXd w = chol_l_.triangularView<Eigen::Lower>().solve(y_std_);
  alpha_ = chol_l_.transpose().triangularView<Eigen::Upper>().solve(w);
  const double logdet = chol_l_.diagonal().array().log().sum();
  lml_ = -0.5 * y_std_.dot(alpha_) - logdet - 0.5 * static_cast<double>(old_n + b) * kLogTwoPi;
}

PosteriorValue GpModel::posterior(const Eigen::VectorXd& x_native) const {
  if (x_native.size() != dim()) throw std::invalid_argument("GpModel::posterior: dimension mismatch");
  Eigen::VectorXd mean(1), var(1);
  posterior_batch(x_native, mean, var);
  return {mean[0], var[0]};
}

void GpModel::posterior_batch(const Eigen::MatrixXd& x_native, Eigen::VectorXd& mean,
                              Eigen::VectorXd& variance) const {
  const long q = x_native.cols();
  mean.resize(q);
  variance.resize(q);
  if (constant_fallback_) {
    mean.setConstant(y_center_);
    variance.setZero();
    return;
  }
  const Eigen::MatrixXd z = stdzr_.to_unit_cols(x_native);
  const Eigen::MatrixXd ks = kernel_.cross(x_std_, z);  // n x q
  const Eigen::MatrixXd v = chol_l_.triangularView<Eigen::Lower>().solve(ks);
  const Eigen::VectorXd mean_std = ks.transpose() * alpha_;
  const Eigen::VectorXd var_std =
      (kernel_.signal_variance - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0).matrix();
  mean = (y_center_ + y_scale_ * mean_std.array()).matrix();
  variance = (y_scale_ * y_scale_ * var_std.array()).matrix();
}

Eigen::VectorXd GpModel::posterior_mean_batch(const Eigen::MatrixXd& x_native) const {
  if (constant_fallback_) return Eigen::VectorXd::Constant(x_native.cols(), y_center_);
  const Eigen::MatrixXd z = stdzr_.to_unit_cols(x_native);
  const Eigen::MatrixXd ks = kernel_.cross(x_std_, z);
  return (y_center_ + y_scale_ * (ks.transpose() * alpha_).array()).matrix();
}

double GpModel::soft_failure_prob_std(double mean_std, double var_std, double threshold) const {
  const double t_std = to_std_threshold(threshold);
  const double sd = std::sqrt(std::max(var_std, 0.0));
  if (sd <= kSigmaFloorStd) return mean_std > t_std ? 1.0 : 0.0;
  return norm_sf((t_std - mean_std) / sd);
}

double GpModel::soft_failure_prob(const Eigen::VectorXd& x_native, double threshold) const {
  if (constant_fallback_) return y_center_ > threshold ? 1.0 : 0.0;
  Eigen::VectorXd mean(1), var(1);
  posterior_batch(x_native, mean, var);
  const double mean_std = (mean[0] - y_center_) / y_scale_;
  const double var_std = var[0] / (y_scale_ * y_scale_);
  return soft_failure_prob_std(mean_std, var_std, threshold);
}

std::string GpModel::summary() const {
  std::ostringstream os;
  os << "n=" << size() << " family="
     << (kernel_.family == KernelFamily::kSquaredExponential ? "se" : "matern52");
  if (constant_fallback_) {
    os << " constant_fallback mean=" << y_center_;
    return os.str();
  }
  os << " lengthscales=[";
  for (int i = 0; i < kernel_.lengthscales.size(); ++i) {
    os << (i ? "," : "") << kernel_.lengthscales[i];
  }
  os << "] signal_variance=" << kernel_.signal_variance << " nugget=" << kernel_.nugget
     << " lml=" << lml_;
  return os.str();
}

PilotPosteriorCache::PilotPosteriorCache(const GpModel& gp, const Eigen::MatrixXd& pilots_std,
                                         long max_points_hint)
    : gp_(&gp), pilots_std_(pilots_std) {
  const long capacity = std::max(max_points_hint, gp.size());
  v_.resize(capacity, pilots_std_.cols());
  ssq_ = Eigen::VectorXd::Zero(pilots_std_.cols());
}

void PilotPosteriorCache::rebuild() {
  const long n = gp_->size();
  if (v_.rows() < n) v_.conservativeResize(n, Eigen::NoChange);
  auto top = v_.topRows(n);
  kernel_cross_into(gp_->kernel(), gp_->inputs_std(), pilots_std_, top);
  gp_->chol_lower().triangularView<Eigen::Lower>().solveInPlace(top);
  ssq_ = top.colwise().squaredNorm().transpose();
  kdiag_ = Eigen::VectorXd::Constant(pilots_std_.cols(), gp_->kernel().signal_variance);
  rows_valid_ = n;
  generation_ = gp_->factorization_generation();
}

void PilotPosteriorCache::extend(long old_n) {
  const long n = gp_->size();
  const long b = n - old_n;
  if (v_.rows() < n) v_.conservativeResize(n, Eigen::NoChange);
  auto rows = v_.middleRows(old_n, b);
  kernel_cross_into(gp_->kernel(), gp_->inputs_std().rightCols(b), pilots_std_, rows);
  rows.noalias() -= gp_->chol_lower().block(old_n, 0, b, old_n) * v_.topRows(old_n);
  gp_->chol_lower()
      .block(old_n, old_n, b, b)
      .triangularView<Eigen::Lower>()
      .solveInPlace(rows);
  ssq_ += rows.colwise().squaredNorm().transpose();
  rows_valid_ = n;
}

void PilotPosteriorCache::posterior_std(Eigen::VectorXd& mean_std, Eigen::VectorXd& var_std) {
  if (generation_ != gp_->factorization_generation()) {
    rebuild();
  } else if (rows_valid_ < gp_->size()) {
    extend(rows_valid_);
  }
  const long n = rows_valid_;
  const Eigen::VectorXd beta = gp_->chol_lower().transpose() * gp_->alpha();
  mean_std = v_.topRows(n).transpose() * beta;
  var_std = (kdiag_ - ssq_).cwiseMax(0.0);
}

Eigen::VectorXd PilotPosteriorCache::soft_failure_probs(double threshold) {
  const long m = pilots_std_.cols();
  Eigen::VectorXd probs(m);
  if (gp_->constant_fallback()) {
    probs.setConstant(gp_->output_center() > threshold ? 1.0 : 0.0);
    return probs;
  }
  Eigen::VectorXd mean_std, var_std;
  posterior_std(mean_std, var_std);
  for (long j = 0; j < m; ++j) {
    probs[j] = gp_->soft_failure_prob_std(mean_std[j], var_std[j], threshold);
  }
  return probs;
}

}  // namespace kdeais
