#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kdeais/estimators.hpp"
#include "kdeais/gp.hpp"
#include "kdeais/limit_states.hpp"
#include "kdeais/math.hpp"
#include "kdeais/run_config.hpp"

namespace kdeais {

struct RunTrace {
  std::vector<TraceRow> rows;  // seed row, then one row per iteration
  Eigen::MatrixXd dataset_x;   // d x N_tot
  Eigen::VectorXd dataset_y;
  FinalEstimates final;        // after the closing refit on all data
  std::string gp_summary;
  std::uint64_t seed = 0;
  long oracle_calls = 0;
  int pure_exploration_iterations = 0;  // degenerate-weights fallbacks
  bool baseline_fallback_to_p = false;  // two-stage: no predicted failures
  std::shared_ptr<const MixtureProposal> first_proposal;
  std::shared_ptr<const MixtureProposal> final_proposal;
};

struct IterationEvent {
  int iteration = 0;                         // 0 = seed row
  const MixtureProposal* proposal = nullptr;  // null for seed/degenerate rows
  const TraceRow* row = nullptr;
};
using IterationObserver = std::function<void(const IterationEvent&)>;

struct DriverHooks {
  /// Replaces the GP surrogate by an exact scalar field (tests/diagnostics):
  /// pi becomes the indicator of exceedance and the multifidelity indicator
  /// uses the stub directly.
  PointFn exact_surrogate;
  IterationObserver observer;
};

/// One full adaptive run: pilot draw, seed design from p, then per iteration
/// GP fit -> soft failure probabilities at the pilots -> weighted KDE ->
/// exploration mixture -> batch sampling -> oracle evaluation -> MIS
/// bookkeeping -> online estimates. The oracle counter advances by exactly
/// seed_points + iterations * batch_size.
RunTrace run_kde_ais(const RunConfig& config, const LimitState& oracle, const InputDensity& p,
                     std::uint64_t seed, const DriverHooks& hooks = {});

struct ReplicationSummary {
  std::vector<RunTrace> traces;           // successful runs, in replication order
  std::vector<std::string> errors;        // non-empty when partial
  bool partial = false;
  std::vector<double> final_mf_mis;
  std::vector<double> final_mis;
  MeanVar mf_mis_stats;
  MeanVar mis_stats;
  double mf_mis_median = kNan;
  double mis_median = kNan;
};

using OracleFactory = std::function<std::unique_ptr<LimitState>()>;

/// R independent runs with derived seeds base_seed + i, executed `jobs` at a
/// time; each replication gets a fresh oracle (independent call counters).
ReplicationSummary run_replications(const RunConfig& config, const InputDensity& p,
                                    const OracleFactory& factory, int replications,
                                    std::uint64_t base_seed, int jobs = 0,
                                    const DriverHooks& hooks = {});

/// Two-stage comparator: stage 1 spends rho * budget on a Latin-hypercube
/// design from p and fits a GP; stage 2 runs single-proposal IS from a KDE
/// over the pilots predicted to fail. Stage-1 evaluations are not reused.
RunTrace run_two_stage_is_baseline(const RunConfig& config, const LimitState& oracle,
                                   const InputDensity& p, std::uint64_t seed);

struct GroundTruth {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::vector<double> per_repeat;
};

/// Naive MC repeated R times; mints local ground truth for cheap benchmarks.
GroundTruth dense_mc_ground_truth(const LimitState& oracle, const InputDensity& p, double t,
                                  long n, int repeats, std::uint64_t seed);

/// Grid total-variation distance between a proposal and the optimal density
/// q_star = p 1{g > t} / P_F (normalized on the same grid). Requires a 2-d
/// benchmark with bounded support.
double tv_distance_check(const MixtureProposal& proposal, const LimitState& oracle,
                         const InputDensity& p, double t, int grid_resolution);

}  // namespace kdeais
