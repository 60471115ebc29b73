// Command-line front end: run / replicate / truth / tv subcommands over a
// JSON experiment file. Science parameters live in the config; the
// KDEAIS_LOG environment variable only controls verbosity (0 silent,
// 1 progress, 2 chatty).

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kdeais/config_io.hpp"
#include "kdeais/driver.hpp"
#include "kdeais/errors.hpp"
#include "kdeais/trace_io.hpp"

namespace {

int log_level() {
  const char* v = std::getenv("KDEAIS_LOG");
  return v ? std::atoi(v) : 1;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "root seed override");
  cmd->add_option("--replications", args.replications, "replication count override");
  cmd->add_option("--jobs", args.jobs, "max concurrent replications (0 = auto)");
}

kdeais::Experiment load(const CommonArgs& args) {
  auto exp = kdeais::parse_config_file(args.config_path);
  if (args.seed) exp.config.seed = *args.seed;
  if (args.replications) exp.config.replications = *args.replications;
  exp.config.validate();
  return exp;
}

int cmd_run(const CommonArgs& args) {
  const auto exp = load(args);
  const auto oracle = kdeais::make_limit_state(exp.config.benchmark);
  if (log_level() >= 1) {
    std::cerr << "run: " << exp.config.benchmark << " t=" << exp.config.threshold
              << " budget=" << exp.config.total_budget() << " seed=" << exp.config.seed << "\n";
  }
  const auto trace = kdeais::run_kde_ais(exp.config, *oracle, exp.input, exp.config.seed);
  kdeais::write_trace(trace, exp.config, args.out_dir);
  std::cout << "p_mis=" << kdeais::format_double(trace.final.p_mis)
            << " p_mf_mis=" << kdeais::format_double(trace.final.p_mf_mis)
            << " r_hat=" << kdeais::format_double(trace.final.r_hat)
            << " evals=" << trace.oracle_calls << "\n";
  return 0;
}

int cmd_replicate(const CommonArgs& args) {
  const auto exp = load(args);
  const std::string benchmark = exp.config.benchmark;
  auto factory = [benchmark] { return kdeais::make_limit_state(benchmark); };
  if (log_level() >= 1) {
    std::cerr << "replicate: " << benchmark << " R=" << exp.config.replications
              << " base_seed=" << exp.config.seed << "\n";
  }
  const auto summary = kdeais::run_replications(exp.config, exp.input, factory,
                                                exp.config.replications, exp.config.seed,
                                                args.jobs);
  for (size_t i = 0; i < summary.traces.size(); ++i) {
    const auto dir = std::filesystem::path(args.out_dir) / ("rep_" + std::to_string(i));
    kdeais::write_trace(summary.traces[i], exp.config, dir.string());
  }
  for (const auto& err : summary.errors) std::cerr << "error: " << err << "\n";
  std::cout << "replications=" << summary.traces.size()
            << " partial=" << (summary.partial ? "true" : "false")
            << " mf_mis_median=" << kdeais::format_double(summary.mf_mis_median)
            << " mf_mis_mean=" << kdeais::format_double(summary.mf_mis_stats.mean)
            << " mf_mis_sd=" << kdeais::format_double(std::sqrt(summary.mf_mis_stats.var))
            << " mis_median=" << kdeais::format_double(summary.mis_median) << "\n";
  return summary.partial ? 3 : 0;
}

int cmd_truth(const CommonArgs& args, long samples, int repeats) {
  const auto exp = load(args);
  const auto oracle = kdeais::make_limit_state(exp.config.benchmark);
  const auto gt = kdeais::dense_mc_ground_truth(*oracle, exp.input, exp.config.threshold, samples,
                                                repeats, exp.config.seed);
  std::cout << "p_f_mean=" << kdeais::format_double(gt.mean)
            << " stderr=" << kdeais::format_double(gt.stderr_of_mean) << " samples=" << samples
            << " repeats=" << repeats << "\n";
  return 0;
}

int cmd_tv(const CommonArgs& args, int grid) {
  const auto exp = load(args);
  const auto oracle = kdeais::make_limit_state(exp.config.benchmark);
  const auto trace = kdeais::run_kde_ais(exp.config, *oracle, exp.input, exp.config.seed);
  if (!trace.first_proposal || !trace.final_proposal) {
    throw kdeais::numerical_error("tv: run produced no usable proposal");
  }
  const auto tv_oracle = kdeais::make_limit_state(exp.config.benchmark);
  const double tv_first = kdeais::tv_distance_check(*trace.first_proposal, *tv_oracle, exp.input,
                                                    exp.config.threshold, grid);
  const double tv_final = kdeais::tv_distance_check(*trace.final_proposal, *tv_oracle, exp.input,
                                                    exp.config.threshold, grid);
  std::cout << "tv_first=" << kdeais::format_double(tv_first)
            << " tv_final=" << kdeais::format_double(tv_final) << " grid=" << grid << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KDE-AIS failure probability estimation"};
  app.require_subcommand(1);

  CommonArgs run_args, rep_args, truth_args, tv_args;
  long truth_samples = 500000;
  int truth_repeats = 20;
  int tv_grid = 200;

  auto* run = app.add_subcommand("run", "single adaptive run");
  add_common(run, run_args);
  auto* rep = app.add_subcommand("replicate", "R runs plus a summary");
  add_common(rep, rep_args);
  auto* truth = app.add_subcommand("truth", "dense Monte Carlo ground truth");
  add_common(truth, truth_args);
  truth->add_option("--samples", truth_samples, "samples per repeat");
  truth->add_option("--repeats", truth_repeats, "independent repeats");
  auto* tv = app.add_subcommand("tv", "total-variation diagnostic (2-d benchmarks)");
  add_common(tv, tv_args);
  tv->add_option("--grid", tv_grid, "grid resolution per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are config errors
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (rep->parsed()) return cmd_replicate(rep_args);
    if (truth->parsed()) return cmd_truth(truth_args, truth_samples, truth_repeats);
    if (tv->parsed()) return cmd_tv(tv_args, tv_grid);
  } catch (const kdeais::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kdeais::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const kdeais::numerical_error& e) {
    std::cerr << "numerical fault: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
