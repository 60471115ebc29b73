#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdeais/marginal.hpp"

namespace kdeais {

/// Hyperparameter fitting cadence. Below `full_refit_below` training points
/// the multi-start fit runs every iteration; above, it reruns when the data
/// has grown by `refit_growth` since the last full fit (the factorization is
/// still extended exactly every iteration). Keeps the per-iteration cost flat
/// once the hyperparameters have settled.
struct GpScheduleOptions {
  std::string kernel = "squared_exponential";  // or "matern_5_2"
  int multistarts = 8;
  int max_evals_per_start = 100;
  double nugget = 1e-8;
  double max_nugget = 1e-2;
  int full_refit_below = 120;
  double refit_growth = 1.25;

  bool operator==(const GpScheduleOptions&) const = default;
};

struct RunConfig {
  std::string benchmark;
  double threshold = 0.0;

  int seed_points = 5;       // N0
  int iterations = 100;      // T
  int batch_size = 5;        // N_b
  long pilot_size = 200000;  // m

  double alpha = 0.97;
  double bandwidth = 0.2;    // fixed h in standardized coordinates
  bool bandwidth_normal_reference = false;  // overrides the fixed h
  double exploration_c = 0.3;
  double exploration_gamma = 0.5;

  long mf_samples_final = 100000;  // M_tot for the final estimate
  long mf_samples_online = 1024;   // M_tot for the per-iteration trace
  bool mf_use_expensive_points = false;  // diagnostic: surrogate set = expensive set

  std::vector<std::string> estimators = {"mis", "mf_mis", "r_hat"};

  std::uint64_t seed = 1;
  int replications = 10;

  double baseline_split = 0.5;        // rho: stage-1 budget fraction
  double baseline_exploration = 0.1;  // p-floor of the baseline proposal

  bool record_wall_time = true;
  GpScheduleOptions gp;

  /// Marginals overriding the benchmark's default input model.
  std::optional<std::vector<Marginal>> input_override;

  long total_budget() const {
    return static_cast<long>(seed_points) + static_cast<long>(iterations) * batch_size;
  }
  bool estimator_enabled(const std::string& name) const;

  /// Throws config_error on any invariant violation.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

struct TraceRow {
  long n_evals = 0;
  double p_mis = 0.0;
  double p_mf_mis = 0.0;
  double p_mf_mis_raw = 0.0;
  double r_hat = 0.0;
  double eta = 0.0;
  double wall_ms = 0.0;
};

struct FinalEstimates {
  long n_evals = 0;
  double p_mis = 0.0;
  double p_mf_mis = 0.0;
  double p_mf_mis_raw = 0.0;
  double r_hat = 0.0;
};

}  // namespace kdeais
