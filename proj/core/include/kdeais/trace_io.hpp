#pragma once

#include <string>

#include "kdeais/driver.hpp"
#include "kdeais/run_config.hpp"

namespace kdeais {

/// Writes a run's artifacts into out_dir:
///   trace.csv    per-iteration rows, header n_evals,p_mis,p_mf_mis,r_hat,eta,wall_ms
///   summary.json final estimates, seed, config echo, provenance string
///   dataset.csv  final dataset, header x1..xd,y
/// Numbers are serialized with 17 significant digits so re-parsing
/// reproduces the in-memory values exactly. Rejects empty traces; I/O
/// failures surface as io_error with the path.
void write_trace(const RunTrace& trace, const RunConfig& config, const std::string& out_dir);

/// Re-reads trace.csv rows (round-trip checks, plotting helpers).
std::vector<TraceRow> read_trace_csv(const std::string& path);

/// 17-significant-digit decimal rendering used by all CSV writers.
std::string format_double(double v);

}  // namespace kdeais
