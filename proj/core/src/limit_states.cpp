#include "kdeais/limit_states.hpp"

#include <cmath>
#include <stdexcept>

namespace kdeais {

double herbie_value(double x1, double x2) {
  auto term = [](double x) {
    return std::exp(-(x - 1.0) * (x - 1.0)) + std::exp(-0.8 * (x + 1.0) * (x + 1.0)) -
           0.05 * std::sin(8.0 * (x + 0.1));
  };
  return term(x1) + term(x2);
}

double four_branch_value(double x1, double x2) {
  const double s = (x1 + x2) / std::sqrt(2.0);
  const double d2 = 0.1 * (x1 - x2) * (x1 - x2);
  const double g1 = 3.0 + d2 - s;
  const double g2 = 3.0 + d2 + s;
  const double g3 = (x1 - x2) + 7.0 / std::sqrt(2.0);
  const double g4 = (x2 - x1) + 7.0 / std::sqrt(2.0);
  return std::min(std::min(g1, g2), std::min(g3, g4));
}

double cantilever_value(double p, double l, double e, double theta) {
  if (!(theta > 0.0) || !(e > 0.0)) {
    throw std::invalid_argument("cantilever: requires E > 0 and thickness > 0");
  }
  constexpr double kWidth = 0.30;     // b [m]
  constexpr double kMaxDeflect = 0.02;  // D_max [m]
  const double deflection = 4.0 * p * l * l * l / (e * kWidth * theta * theta * theta);
  return deflection - kMaxDeflect;
}

double shaft_value(double m, double t, double d, double sigma_y, double g) {
  if (!(d > 0.0) || !(sigma_y > 0.0) || !(g > 0.0)) {
    throw std::invalid_argument("shaft: requires d > 0, sigma_y > 0, G > 0");
  }
  constexpr double kLength = 1.2;     // L [m]
  constexpr double kSafety = 1.5;     // S_F
  constexpr double kMaxTwist = 0.06;  // theta_max [rad]
  const double d3 = d * d * d;
  const double sigma_b = 32.0 * m / (M_PI * d3);
  const double tau = 16.0 * t / (M_PI * d3);
  const double sigma_vm = std::sqrt(sigma_b * sigma_b + 3.0 * tau * tau);
  const double sigma_allow = sigma_y / kSafety;
  const double twist = 32.0 * t * kLength / (g * M_PI * d3 * d);
  return std::max(sigma_vm / sigma_allow, twist / kMaxTwist);
}

namespace {

class Herbie final : public LimitState {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "herbie"; }
  InputDensity default_input_density() const override {
    return InputDensity({Marginal::uniform(-2.0, 2.0), Marginal::uniform(-2.0, 2.0)});
  }
  BenchmarkDefaults defaults() const override { return {2.0, 5, 100, 5}; }

 protected:
  double evaluate_impl(const Eigen::VectorXd& x) const override {
    return herbie_value(x[0], x[1]);
  }
};

class FourBranch final : public LimitState {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "four_branch"; }
  InputDensity default_input_density() const override {
    return InputDensity({Marginal::uniform(-8.0, 8.0), Marginal::uniform(-8.0, 8.0)});
  }
  BenchmarkDefaults defaults() const override { return {2.0, 5, 100, 5}; }

 protected:
  double evaluate_impl(const Eigen::VectorXd& x) const override {
    return four_branch_value(x[0], x[1]);
  }
};

class Cantilever final : public LimitState {
 public:
  int dim() const override { return 4; }
  std::string name() const override { return "cantilever"; }
  InputDensity default_input_density() const override {
    // x = (P, L, E, Theta); E is lognormal with mean 2.1e11 Pa and cv 0.05.
    const double cv = 0.05;
    const double s2 = std::log(1.0 + cv * cv);
    const double mu_log = std::log(2.1e11) - 0.5 * s2;
    return InputDensity({Marginal::normal(1e4, 2e2), Marginal::uniform(3.0, 3.1),
                         Marginal::lognormal(mu_log, std::sqrt(s2)),
                         Marginal::uniform(0.10, 0.20)});
  }
  BenchmarkDefaults defaults() const override { return {0.0, 50, 50, 5}; }

 protected:
  double evaluate_impl(const Eigen::VectorXd& x) const override {
    return cantilever_value(x[0], x[1], x[2], x[3]);
  }
};

class Shaft final : public LimitState {
 public:
  int dim() const override { return 5; }
  std::string name() const override { return "shaft"; }
  InputDensity default_input_density() const override {
    // x = (M, T, d, sigma_y, G); the nominal diameter is 0.04 m.
    const double d_nom = 0.04;
    return InputDensity({Marginal::lognormal(std::log(450.0), std::sqrt(std::log(1.0 + 0.25 * 0.25))),
                         Marginal::lognormal(std::log(300.0), std::sqrt(std::log(1.0 + 0.30 * 0.30))),
                         Marginal::truncated_normal(d_nom, 5e-4, d_nom - 0.002, d_nom + 0.002),
                         Marginal::truncated_normal(370e6, 30e6, 250e6, 500e6),
                         Marginal::truncated_normal(80e9, 3e9, 70e9, 90e9)});
  }
  BenchmarkDefaults defaults() const override { return {1.0, 50, 200, 5}; }

 protected:
  double evaluate_impl(const Eigen::VectorXd& x) const override {
    return shaft_value(x[0], x[1], x[2], x[3], x[4]);
  }
};

class Quadrant final : public LimitState {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "quadrant"; }
  InputDensity default_input_density() const override {
    return InputDensity({Marginal::uniform(-1.0, 1.0), Marginal::uniform(-1.0, 1.0)});
  }
  BenchmarkDefaults defaults() const override { return {0.0, 5, 20, 5}; }

 protected:
  double evaluate_impl(const Eigen::VectorXd& x) const override {
    return std::min(x[0], x[1]);
  }
};

}  // namespace

std::unique_ptr<LimitState> make_limit_state(const std::string& name) {
  if (name == "herbie") return std::make_unique<Herbie>();
  if (name == "four_branch") return std::make_unique<FourBranch>();
  if (name == "cantilever") return std::make_unique<Cantilever>();
  if (name == "shaft") return std::make_unique<Shaft>();
  if (name == "quadrant") return std::make_unique<Quadrant>();
  throw std::invalid_argument("unknown benchmark: " + name);
}

std::vector<std::string> limit_state_names() {
  return {"herbie", "four_branch", "cantilever", "shaft", "quadrant"};
}

}  // namespace kdeais
