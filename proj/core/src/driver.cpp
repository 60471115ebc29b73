#include "kdeais/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <semaphore>
#include <stdexcept>
#include <thread>

#include "kdeais/errors.hpp"
#include "kdeais/kde.hpp"
#include "kdeais/rng.hpp"

namespace kdeais {

namespace {

KernelFamily parse_kernel(const std::string& name) {
  if (name == "squared_exponential") return KernelFamily::kSquaredExponential;
  if (name == "matern_5_2") return KernelFamily::kMatern52;
  throw config_error("unknown kernel family: " + name);
}

GpFitOptions fit_options(const RunConfig& cfg, std::uint64_t fit_seed) {
  GpFitOptions o;
  o.family = parse_kernel(cfg.gp.kernel);
  o.multistarts = cfg.gp.multistarts;
  o.max_evals_per_start = cfg.gp.max_evals_per_start;
  o.nugget = cfg.gp.nugget;
  o.max_nugget = cfg.gp.max_nugget;
  o.seed = fit_seed;
  return o;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Per-run state for the single-stage loop; owns the sample ledger and the
// incremental unnormalized mixture cache a_i = sum_k N_k q_k(x_i).
struct LoopState {
  std::vector<LabeledSample> samples;
  std::vector<double> log_p;       // log p(x_i), cached
  std::vector<double> mix_accum;   // a_i, density space (all terms nonnegative)
  Eigen::MatrixXd xs;              // d x N, same order as samples
  Eigen::VectorXd ys;

  void append_batch(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int proposal_index,
                    const InputDensity& p) {
    const long old_n = xs.cols();
    const long b = x.cols();
    xs.conservativeResize(p.dim(), old_n + b);
    xs.rightCols(b) = x;
    ys.conservativeResize(old_n + b);
    ys.tail(b) = y;
    for (long j = 0; j < b; ++j) {
      samples.push_back({x.col(j), y[j], proposal_index});
      log_p.push_back(p.log_density(x.col(j)));
      mix_accum.push_back(0.0);
    }
  }

  Eigen::VectorXd log_bar_q(long n_tot) const {
    const long n = static_cast<long>(mix_accum.size());
    Eigen::VectorXd out(n);
    const double log_n = std::log(static_cast<double>(n_tot));
    for (long i = 0; i < n; ++i) {
      out[i] = mix_accum[static_cast<size_t>(i)] > 0.0
                   ? std::log(mix_accum[static_cast<size_t>(i)]) - log_n
                   : kNegInf;
    }
    return out;
  }
};

}  // namespace

bool RunConfig::estimator_enabled(const std::string& name) const {
  return std::find(estimators.begin(), estimators.end(), name) != estimators.end();
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw config_error(msg); };
  if (benchmark.empty()) fail("benchmark must be set");
  if (seed_points < 2) fail("seed_points: N0 >= 2 required");
  if (iterations < 1) fail("iterations: T >= 1 required");
  if (batch_size < 1) fail("batch_size: N_b >= 1 required");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (!(exploration_gamma > 0.0 && exploration_gamma < 1.0)) {
    fail("exploration_gamma: 0 < gamma < 1 required");
  }
  if (!(exploration_c > 0.0)) fail("exploration_c: c > 0 required");
  if (pilot_size < batch_size) fail("pilot_size: m >= N_b required");
  if (!bandwidth_normal_reference && !(bandwidth > 0.0)) fail("bandwidth must be positive");
  if (mf_samples_final < 0 || mf_samples_online < 0) fail("mf sample counts must be >= 0");
  if (!(baseline_split > 0.0 && baseline_split < 1.0)) fail("baseline_split: rho in (0, 1) required");
  if (!(baseline_exploration > 0.0 && baseline_exploration <= 1.0)) {
    fail("baseline_exploration must lie in (0, 1]");
  }
  if (replications < 1) fail("replications: R >= 1 required");
  if (gp.multistarts < 1) fail("gp.multistarts >= 1 required");
  if (gp.max_evals_per_start < 10) fail("gp.max_evals_per_start >= 10 required");
  if (!(gp.nugget >= 0.0)) fail("gp.nugget must be >= 0");
  if (!(gp.refit_growth > 1.0)) fail("gp.refit_growth must exceed 1");
  parse_kernel(gp.kernel);
  for (const auto& e : estimators) {
    if (e != "mis" && e != "mf_mis" && e != "r_hat") fail("unknown estimator: " + e);
  }
}

RunTrace run_kde_ais(const RunConfig& config, const LimitState& oracle, const InputDensity& p_in,
                     std::uint64_t seed, const DriverHooks& hooks) {
  config.validate();
  if (p_in.dim() != oracle.dim()) {
    throw std::invalid_argument("run_kde_ais: input density / oracle dimension mismatch");
  }
  const double t = config.threshold;
  const long n0 = config.seed_points;
  const long nb = config.batch_size;
  const long budget = config.total_budget();
  const long calls_at_entry = oracle.call_count();
  const bool want_mf = config.estimator_enabled("mf_mis");
  const bool want_r = config.estimator_enabled("r_hat");
  const bool exact_stub = static_cast<bool>(hooks.exact_surrogate);

  auto p = std::make_shared<const InputDensity>(p_in);
  auto stdzr = std::make_shared<const Standardizer>(Standardizer::from_input_density(p_in));
  RngForker forker(seed);

  // Pilot set: drawn once per run, shared by every KDE snapshot.
  auto rng_pilot = forker.stream("pilot");
  const Eigen::MatrixXd pilots_native = p->sample(rng_pilot, config.pilot_size);
  auto pilots_std =
      std::make_shared<const Eigen::MatrixXd>(stdzr->to_unit_cols(pilots_native));

  RunTrace trace;
  trace.seed = seed;
  ProposalHistory history(p, stdzr);
  LoopState state;

  // Seed design from p.
  {
    auto rng_seed = forker.stream("seed_design");
    const Eigen::MatrixXd x0 = p->sample(rng_seed, n0);
    const Eigen::VectorXd y0 = oracle.evaluate_batch(x0);
    history.append_input_density(n0);
    state.append_batch(x0, y0, 0, *p);
    for (long i = 0; i < n0; ++i) {
      state.mix_accum[static_cast<size_t>(i)] =
          static_cast<double>(n0) * std::exp(state.log_p[static_cast<size_t>(i)]);
    }
    TraceRow row;
    row.n_evals = n0;
    row.p_mis = mis_estimate_with_log_bar_q(state.samples, state.log_bar_q(n0), *p, n0, t);
    row.p_mf_mis = row.p_mf_mis_raw = row.r_hat = row.eta = kNan;
    trace.rows.push_back(row);
    if (hooks.observer) {
      IterationEvent ev{0, nullptr, &trace.rows.back()};
      hooks.observer(ev);
    }
  }

  std::optional<GpModel> gp;
  std::optional<PilotPosteriorCache> pilot_cache;
  long last_full_fit_n = 0;

  auto maybe_fit_gp = [&](int iteration) {
    if (exact_stub) return;
    const long n = state.xs.cols();
    if (!gp) {
      gp.emplace(GpModel::fit(state.xs, state.ys, *stdzr,
                              fit_options(config, forker.derive("gpfit", 0))));
      pilot_cache.emplace(*gp, *pilots_std, budget);
      last_full_fit_n = n;
      return;
    }
    gp->append(state.xs.rightCols(nb), state.ys.tail(nb));
    const bool due = n <= config.gp.full_refit_below ||
                     static_cast<double>(n) >=
                         config.gp.refit_growth * static_cast<double>(last_full_fit_n);
    if (due) {
      gp->refit_hyperparameters(
          fit_options(config, forker.derive("gpfit", static_cast<std::uint64_t>(iteration))));
      last_full_fit_n = n;
    }
  };

  auto pilot_soft_probs = [&](double threshold) -> Eigen::VectorXd {
    if (exact_stub) {
      Eigen::VectorXd probs(pilots_native.cols());
      for (long j = 0; j < pilots_native.cols(); ++j) {
        probs[j] = hooks.exact_surrogate(pilots_native.col(j)) > threshold ? 1.0 : 0.0;
      }
      return probs;
    }
    return pilot_cache->soft_failure_probs(threshold);
  };

  auto surrogate_mean_batch = [&](const Eigen::MatrixXd& pts) -> Eigen::VectorXd {
    if (exact_stub) {
      Eigen::VectorXd out(pts.cols());
      for (long j = 0; j < pts.cols(); ++j) out[j] = hooks.exact_surrogate(pts.col(j));
      return out;
    }
    return gp->posterior_mean_batch(pts);
  };

  auto pi_at_points = [&](const Eigen::MatrixXd& pts) -> Eigen::VectorXd {
    Eigen::VectorXd out(pts.cols());
    if (exact_stub) {
      for (long j = 0; j < pts.cols(); ++j) {
        out[j] = hooks.exact_surrogate(pts.col(j)) > t ? 1.0 : 0.0;
      }
      return out;
    }
    Eigen::VectorXd mean, var;
    gp->posterior_batch(pts, mean, var);
    const double c = gp->output_center(), s = gp->output_scale();
    for (long j = 0; j < pts.cols(); ++j) {
      out[j] = gp->soft_failure_prob_std((mean[j] - c) / s, var[j] / (s * s), t);
    }
    return out;
  };

  // Online multifidelity estimate against the current history.
  auto mf_online = [&](long m_tot, std::mt19937_64& rng,
                       const Eigen::VectorXd& log_bar_exp) -> MfMisResult {
    Eigen::MatrixXd sur_pts;
    if (config.mf_use_expensive_points) {
      sur_pts = state.xs;
    } else if (m_tot > 0) {
      sur_pts = history.sample_proportional(rng, m_tot);
    }
    Eigen::VectorXd log_bar_sur, mean_sur;
    if (sur_pts.cols() > 0) {
      log_bar_sur = config.mf_use_expensive_points ? log_bar_exp
                                                   : history.log_bar_density_batch(sur_pts);
      mean_sur = surrogate_mean_batch(sur_pts);
    }
    const Eigen::VectorXd mean_exp = surrogate_mean_batch(state.xs);
    return mf_mis_estimate_prepared(sur_pts, log_bar_sur, mean_sur, state.samples, log_bar_exp,
                                    mean_exp, *p, history.total(), t);
  };

  std::shared_ptr<const MixtureProposal> last_proposal;

  for (int n = 1; n <= config.iterations; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    maybe_fit_gp(n);

    const Eigen::VectorXd probs = pilot_soft_probs(t);
    auto kde = WeightedKde::build(pilots_std, probs, config.alpha,
                                  config.bandwidth_normal_reference
                                      ? normal_reference_scalar_bandwidth(
                                            *pilots_std, static_cast<double>(pilots_std->cols()))
                                      : config.bandwidth);

    const double eta = eta_schedule(n, config.exploration_c, config.exploration_gamma);
    std::shared_ptr<const MixtureProposal> proposal;
    auto rng_batch = forker.stream("batch", static_cast<std::uint64_t>(n));
    Eigen::MatrixXd batch;
    if (kde.has_value()) {
      proposal = std::make_shared<const MixtureProposal>(std::move(*kde), eta, p, stdzr);
      batch = proposal->sample(rng_batch, nb);
    } else {
      // Degenerate weights: pure-exploration iteration drawn from p itself.
      ++trace.pure_exploration_iterations;
      batch = p->sample(rng_batch, nb);
    }
    const Eigen::VectorXd y_batch = oracle.evaluate_batch(batch);

    // MIS bookkeeping: extend the accumulated mixture density of the old
    // samples by the new snapshot, then price the new samples via bar_q.
    const int entry_index = static_cast<int>(history.entry_count());
    if (proposal) {
      history.append(*proposal, nb);
      for (size_t i = 0; i < state.samples.size(); ++i) {
        state.mix_accum[i] += static_cast<double>(nb) *
                              std::exp(proposal->log_density(state.samples[i].x));
      }
      last_proposal = proposal;
      if (!trace.first_proposal) trace.first_proposal = proposal;
    } else {
      history.append_input_density(nb);
      for (size_t i = 0; i < state.samples.size(); ++i) {
        state.mix_accum[i] += static_cast<double>(nb) * std::exp(state.log_p[i]);
      }
    }
    state.append_batch(batch, y_batch, entry_index, *p);
    {
      const Eigen::VectorXd log_bar_new = history.log_bar_density_batch(batch);
      const double log_total = std::log(static_cast<double>(history.total()));
      for (long j = 0; j < nb; ++j) {
        const size_t idx = state.samples.size() - static_cast<size_t>(nb - j);
        state.mix_accum[idx] =
            log_bar_new[j] == kNegInf ? 0.0 : std::exp(log_bar_new[j] + log_total);
      }
    }

    // Online estimates (Algorithm line 12): surrogate trained before this batch.
    TraceRow row;
    row.n_evals = n0 + static_cast<long>(n) * nb;
    row.eta = eta;
    const Eigen::VectorXd log_bar = state.log_bar_q(history.total());
    row.p_mis = mis_estimate_with_log_bar_q(state.samples, log_bar, *p, history.total(), t);
    if (want_mf) {
      auto rng_mf = forker.stream("mfmis", static_cast<std::uint64_t>(n));
      const MfMisResult mf = mf_online(config.mf_samples_online, rng_mf, log_bar);
      row.p_mf_mis = mf.estimate;
      row.p_mf_mis_raw = mf.raw;
    } else {
      row.p_mf_mis = row.p_mf_mis_raw = kNan;
    }
    if (want_r) {
      const Eigen::VectorXd pi = pi_at_points(state.xs);
      row.r_hat = surrogate_error_estimate_prepared(state.samples, log_bar, pi, *p,
                                                    history.total(), t);
    } else {
      row.r_hat = kNan;
    }
    row.wall_ms = config.record_wall_time ? elapsed_ms(t0) : 0.0;
    trace.rows.push_back(row);
    if (hooks.observer) {
      IterationEvent ev{n, proposal ? proposal.get() : nullptr, &trace.rows.back()};
      hooks.observer(ev);
    }
  }

  // Closing refit on the full dataset, final heavy estimate, final proposal.
  if (!exact_stub) {
    gp->append(state.xs.rightCols(nb), state.ys.tail(nb));
    gp->refit_hyperparameters(fit_options(config, forker.derive("gpfit_final")));
    trace.gp_summary = gp->summary();
  } else {
    trace.gp_summary = "exact-surrogate stub";
  }
  {
    const Eigen::VectorXd probs = pilot_soft_probs(t);
    auto kde = WeightedKde::build(pilots_std, probs, config.alpha,
                                  config.bandwidth_normal_reference
                                      ? normal_reference_scalar_bandwidth(
                                            *pilots_std, static_cast<double>(pilots_std->cols()))
                                      : config.bandwidth);
    const double eta_final =
        eta_schedule(config.iterations + 1, config.exploration_c, config.exploration_gamma);
    if (kde.has_value()) {
      trace.final_proposal =
          std::make_shared<const MixtureProposal>(std::move(*kde), eta_final, p, stdzr);
    } else {
      trace.final_proposal = last_proposal;
    }
  }
  trace.final.n_evals = budget;
  {
    const Eigen::VectorXd log_bar = state.log_bar_q(history.total());
    trace.final.p_mis =
        mis_estimate_with_log_bar_q(state.samples, log_bar, *p, history.total(), t);
    if (want_mf) {
      auto rng_mf = forker.stream("mfmis_final");
      const MfMisResult mf = mf_online(config.mf_samples_final, rng_mf, log_bar);
      trace.final.p_mf_mis = mf.estimate;
      trace.final.p_mf_mis_raw = mf.raw;
    } else {
      trace.final.p_mf_mis = trace.final.p_mf_mis_raw = kNan;
    }
    if (want_r) {
      const Eigen::VectorXd pi = pi_at_points(state.xs);
      trace.final.r_hat = surrogate_error_estimate_prepared(state.samples, log_bar, pi, *p,
                                                            history.total(), t);
    } else {
      trace.final.r_hat = kNan;
    }
  }

  trace.dataset_x = state.xs;
  trace.dataset_y = state.ys;
  trace.oracle_calls = oracle.call_count() - calls_at_entry;
  if (trace.oracle_calls != budget) {
    throw std::logic_error("run_kde_ais: oracle budget audit failed");
  }
  return trace;
}

ReplicationSummary run_replications(const RunConfig& config, const InputDensity& p,
                                    const OracleFactory& factory, int replications,
                                    std::uint64_t base_seed, int jobs, const DriverHooks& hooks) {
  if (replications < 1) throw std::invalid_argument("run_replications: R >= 1 required");
  if (jobs <= 0) {
    // Each in-flight run owns a pilot cache of budget x m doubles; cap the
    // default concurrency so memory stays bounded on wide machines.
    jobs = static_cast<int>(std::min<unsigned>(std::thread::hardware_concurrency(),
                                               static_cast<unsigned>(replications)));
    jobs = std::clamp(jobs, 1, 4);
  }

  ReplicationSummary out;
  std::counting_semaphore<> gate(jobs);
  std::vector<std::future<RunTrace>> futures;
  futures.reserve(static_cast<size_t>(replications));
  for (int i = 0; i < replications; ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      gate.acquire();
      struct Release {
        std::counting_semaphore<>* g;
        ~Release() { g->release(); }
      } release{&gate};
      auto oracle = factory();
      return run_kde_ais(config, *oracle, p, base_seed + static_cast<std::uint64_t>(i), hooks);
    }));
  }
  for (int i = 0; i < replications; ++i) {
    try {
      out.traces.push_back(futures[static_cast<size_t>(i)].get());
    } catch (const std::exception& e) {
      out.partial = true;
      out.errors.push_back("replication " + std::to_string(i) + ": " + e.what());
    }
  }
  for (const auto& tr : out.traces) {
    out.final_mf_mis.push_back(tr.final.p_mf_mis);
    out.final_mis.push_back(tr.final.p_mis);
  }
  if (!out.traces.empty()) {
    out.mf_mis_stats = mean_var(out.final_mf_mis);
    out.mis_stats = mean_var(out.final_mis);
    if (!std::isnan(out.final_mf_mis.front())) out.mf_mis_median = median(out.final_mf_mis);
    out.mis_median = median(out.final_mis);
  }
  return out;
}

RunTrace run_two_stage_is_baseline(const RunConfig& config, const LimitState& oracle,
                                   const InputDensity& p_in, std::uint64_t seed) {
  config.validate();
  const double t = config.threshold;
  const long budget = config.total_budget();
  const long n1 = std::lround(config.baseline_split * static_cast<double>(budget));
  const long n2 = budget - n1;
  if (n1 < 2 || n2 < 1) throw config_error("baseline: split leaves too few samples per stage");
  const long calls_at_entry = oracle.call_count();

  auto p = std::make_shared<const InputDensity>(p_in);
  auto stdzr = std::make_shared<const Standardizer>(Standardizer::from_input_density(p_in));
  RngForker forker(seed);

  RunTrace trace;
  trace.seed = seed;

  // Stage 1: Latin hypercube over the marginal quantiles (space-filling under p).
  Eigen::MatrixXd x1(p->dim(), n1);
  {
    auto rng = forker.stream("stage1_design");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> perm(static_cast<size_t>(n1));
    for (int i = 0; i < p->dim(); ++i) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (long j = 0; j < n1; ++j) {
        const double u = (static_cast<double>(perm[static_cast<size_t>(j)]) + unif(rng)) /
                         static_cast<double>(n1);
        x1(i, j) = p->marginal(i).ppf(u);
      }
    }
  }
  const Eigen::VectorXd y1 = oracle.evaluate_batch(x1);
  GpModel gp = GpModel::fit(x1, y1, *stdzr, fit_options(config, forker.derive("baseline_gpfit")));

  auto rng_pilot = forker.stream("pilot");
  const Eigen::MatrixXd pilots_native = p->sample(rng_pilot, config.pilot_size);
  auto pilots_std = std::make_shared<const Eigen::MatrixXd>(stdzr->to_unit_cols(pilots_native));

  // Predicted failures at the pilots; 0/1 probabilities make the KDE uniform
  // over the predicted set.
  const Eigen::VectorXd mean_at_pilots = gp.posterior_mean_batch(pilots_native);
  Eigen::VectorXd predicted(pilots_native.cols());
  for (long j = 0; j < pilots_native.cols(); ++j) predicted[j] = mean_at_pilots[j] > t ? 1.0 : 0.0;

  auto kde = WeightedKde::build(pilots_std, predicted, config.alpha,
                                config.bandwidth_normal_reference
                                    ? normal_reference_scalar_bandwidth(
                                          *pilots_std, static_cast<double>(pilots_std->cols()))
                                    : config.bandwidth);
  std::shared_ptr<const MixtureProposal> proposal;
  if (kde.has_value()) {
    proposal = std::make_shared<const MixtureProposal>(std::move(*kde), config.baseline_exploration,
                                                       p, stdzr);
  } else {
    trace.baseline_fallback_to_p = true;  // no predicted failures: q = p
  }

  TraceRow stage1_row;
  stage1_row.n_evals = n1;
  stage1_row.p_mis = stage1_row.p_mf_mis = stage1_row.p_mf_mis_raw = stage1_row.r_hat =
      stage1_row.eta = kNan;
  trace.rows.push_back(stage1_row);

  // Stage 2: single-proposal IS; stage-1 evaluations are not reused.
  auto rng_stage2 = forker.stream("stage2");
  const Eigen::MatrixXd x2 =
      proposal ? proposal->sample(rng_stage2, n2) : p->sample(rng_stage2, n2);
  const Eigen::VectorXd y2 = oracle.evaluate_batch(x2);
  std::vector<LabeledSample> stage2;
  stage2.reserve(static_cast<size_t>(n2));
  for (long j = 0; j < n2; ++j) stage2.push_back({x2.col(j), y2[j], 0});

  PointFn log_q = proposal
                      ? PointFn([proposal](const Eigen::VectorXd& x) { return proposal->log_density(x); })
                      : PointFn([p](const Eigen::VectorXd& x) { return p->log_density(x); });
  const double estimate = is_estimate(stage2, log_q, *p, t);

  TraceRow final_row;
  final_row.n_evals = budget;
  final_row.p_mis = estimate;
  final_row.p_mf_mis = final_row.p_mf_mis_raw = final_row.r_hat = final_row.eta = kNan;
  trace.rows.push_back(final_row);

  trace.final.n_evals = budget;
  trace.final.p_mis = estimate;
  trace.final.p_mf_mis = trace.final.p_mf_mis_raw = trace.final.r_hat = kNan;
  trace.gp_summary = gp.summary();
  trace.dataset_x = x2;
  trace.dataset_y = y2;
  trace.oracle_calls = oracle.call_count() - calls_at_entry;
  if (trace.oracle_calls != budget) {
    throw std::logic_error("run_two_stage_is_baseline: oracle budget audit failed");
  }
  return trace;
}

GroundTruth dense_mc_ground_truth(const LimitState& oracle, const InputDensity& p, double t,
                                  long n, int repeats, std::uint64_t seed) {
  if (n < 1 || repeats < 1) throw std::invalid_argument("dense_mc_ground_truth: n, repeats >= 1");
  RngForker forker(seed);
  GroundTruth out;
  out.per_repeat.reserve(static_cast<size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    auto rng = forker.stream("dense_mc", static_cast<std::uint64_t>(r));
    long failures = 0;
    constexpr long kChunk = 65536;
    long remaining = n;
    while (remaining > 0) {
      const long take = std::min(kChunk, remaining);
      const Eigen::MatrixXd x = p.sample(rng, take);
      for (long j = 0; j < take; ++j) {
        if (oracle(x.col(j)) > t) ++failures;
      }
      remaining -= take;
    }
    out.per_repeat.push_back(static_cast<double>(failures) / static_cast<double>(n));
  }
  const MeanVar mv = mean_var(out.per_repeat);
  out.mean = mv.mean;
  out.stderr_of_mean = repeats > 1 ? std::sqrt(mv.var / static_cast<double>(repeats)) : 0.0;
  return out;
}

double tv_distance_check(const MixtureProposal& proposal, const LimitState& oracle,
                         const InputDensity& p, double t, int grid_resolution) {
  if (p.dim() != 2) throw std::invalid_argument("tv_distance_check: requires d == 2");
  if (grid_resolution < 2) throw std::invalid_argument("tv_distance_check: grid too small");
  for (int i = 0; i < 2; ++i) {
    if (!p.marginal(i).bounded()) {
      throw std::invalid_argument("tv_distance_check: requires bounded support");
    }
  }
  const double lo0 = p.marginal(0).support_lo(), hi0 = p.marginal(0).support_hi();
  const double lo1 = p.marginal(1).support_lo(), hi1 = p.marginal(1).support_hi();
  const double dx = (hi0 - lo0) / grid_resolution;
  const double dy = (hi1 - lo1) / grid_resolution;
  const double cell = dx * dy;

  Eigen::MatrixXd pf_un(grid_resolution, grid_resolution);  // p * 1{g > t}
  Eigen::MatrixXd qn(grid_resolution, grid_resolution);
  double pf_grid = 0.0;
  Eigen::VectorXd x(2);
  for (int i = 0; i < grid_resolution; ++i) {
    x[0] = lo0 + (i + 0.5) * dx;
    for (int j = 0; j < grid_resolution; ++j) {
      x[1] = lo1 + (j + 0.5) * dy;
      const double pv = std::exp(p.log_density(x));
      const double failed = oracle(x) > t ? 1.0 : 0.0;
      pf_un(i, j) = pv * failed;
      pf_grid += pf_un(i, j) * cell;
      const double lq = proposal.log_density(x);
      qn(i, j) = lq == kNegInf ? 0.0 : std::exp(lq);
    }
  }
  if (!(pf_grid > 0.0)) throw numerical_error("tv_distance_check: grid-based P_F is zero");

  double tv = 0.0;
  for (int i = 0; i < grid_resolution; ++i) {
    for (int j = 0; j < grid_resolution; ++j) {
      tv += std::abs(qn(i, j) - pf_un(i, j) / pf_grid) * cell;
    }
  }
  return 0.5 * tv;
}

}  // namespace kdeais
