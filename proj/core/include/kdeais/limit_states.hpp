#pragma once

#include <Eigen/Core>
#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "kdeais/input_density.hpp"

namespace kdeais {

/// Benchmark defaults mirroring the experimental-settings table.
struct BenchmarkDefaults {
  double threshold = 0.0;
  int seed_points = 5;   // N0
  int iterations = 100;  // T
  int batch_size = 5;    // N_b
};

/// Deterministic scalar oracle g with failure convention g(x) > t. The call
/// counter increments by exactly one per evaluation; replications must use
/// independent instances.
class LimitState {
 public:
  virtual ~LimitState() = default;

  double operator()(const Eigen::VectorXd& x) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return evaluate_impl(x);
  }

  Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(x.cols());
    for (long j = 0; j < x.cols(); ++j) out[j] = (*this)(x.col(j));
    return out;
  }

  long call_count() const { return calls_.load(std::memory_order_relaxed); }
  void reset_call_count() const { calls_.store(0, std::memory_order_relaxed); }

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual InputDensity default_input_density() const = 0;
  virtual BenchmarkDefaults defaults() const = 0;

 protected:
  virtual double evaluate_impl(const Eigen::VectorXd& x) const = 0;

 private:
  mutable std::atomic<long> calls_{0};
};

/// Named registry: "herbie", "four_branch", "cantilever", "shaft", "quadrant".
/// Each call returns a fresh instance with its own call counter.
std::unique_ptr<LimitState> make_limit_state(const std::string& name);
std::vector<std::string> limit_state_names();

// Direct formula access for tests and oracles.
double herbie_value(double x1, double x2);
double four_branch_value(double x1, double x2);
double cantilever_value(double p, double l, double e, double theta);
double shaft_value(double m, double t, double d, double sigma_y, double g);

}  // namespace kdeais
