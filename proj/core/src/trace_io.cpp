#include "kdeais/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdeais/config_io.hpp"
#include "kdeais/errors.hpp"

namespace kdeais {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& field, const std::string& path) {
  try {
    return std::stod(field);
  } catch (const std::exception&) {
    throw io_error("malformed numeric field '" + field + "' in " + path);
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw io_error("cannot open for writing: " + p.string());
  return out;
}

// FNV-1a of the config echo + seed: a stable run fingerprint.
std::string provenance_string(const RunConfig& cfg, std::uint64_t seed) {
  const std::string echo = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : echo) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  h ^= seed;
  h *= 1099511628211ull;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "kdeais-0.1.0+run.%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void write_trace(const RunTrace& trace, const RunConfig& config, const std::string& out_dir) {
  if (trace.rows.empty()) throw std::invalid_argument("write_trace: empty trace");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create output directory: " + out_dir);

  {
    auto out = open_out(fs::path(out_dir) / "trace.csv");
    out << "n_evals,p_mis,p_mf_mis,r_hat,eta,wall_ms\n";
    for (const auto& r : trace.rows) {
      out << r.n_evals << ',' << format_double(r.p_mis) << ',' << format_double(r.p_mf_mis) << ','
          << format_double(r.r_hat) << ',' << format_double(r.eta) << ','
          << format_double(r.wall_ms) << '\n';
    }
    if (!out) throw io_error("write failed: " + (fs::path(out_dir) / "trace.csv").string());
  }

  {
    auto out = open_out(fs::path(out_dir) / "dataset.csv");
    const long d = trace.dataset_x.rows();
    for (long i = 0; i < d; ++i) out << 'x' << (i + 1) << ',';
    out << "y\n";
    for (long j = 0; j < trace.dataset_x.cols(); ++j) {
      for (long i = 0; i < d; ++i) out << format_double(trace.dataset_x(i, j)) << ',';
      out << format_double(trace.dataset_y[j]) << '\n';
    }
    if (!out) throw io_error("write failed: " + (fs::path(out_dir) / "dataset.csv").string());
  }

  {
    json s;
    s["seed"] = trace.seed;
    s["oracle_calls"] = trace.oracle_calls;
    s["provenance"] = provenance_string(config, trace.seed);
    s["final"] = {{"n_evals", trace.final.n_evals},
                  {"p_mis", trace.final.p_mis},
                  {"p_mf_mis", trace.final.p_mf_mis},
                  {"p_mf_mis_raw", trace.final.p_mf_mis_raw},
                  {"r_hat", trace.final.r_hat}};
    s["gp_summary"] = trace.gp_summary;
    s["pure_exploration_iterations"] = trace.pure_exploration_iterations;
    s["baseline_fallback_to_p"] = trace.baseline_fallback_to_p;
    s["config"] = json::parse(serialize_config(config));
    auto out = open_out(fs::path(out_dir) / "summary.json");
    out << s.dump(2) << '\n';
    if (!out) throw io_error("write failed: " + (fs::path(out_dir) / "summary.json").string());
  }
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty trace file: " + path);
  if (line != "n_evals,p_mis,p_mf_mis,r_hat,eta,wall_ms") {
    throw io_error("unexpected trace header in " + path);
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    TraceRow r;
    std::getline(ls, field, ',');
    r.n_evals = static_cast<long>(parse_double(field, path));
    std::getline(ls, field, ',');
    r.p_mis = parse_double(field, path);
    std::getline(ls, field, ',');
    r.p_mf_mis = parse_double(field, path);
    std::getline(ls, field, ',');
    r.r_hat = parse_double(field, path);
    std::getline(ls, field, ',');
    r.eta = parse_double(field, path);
    std::getline(ls, field, ',');
    r.wall_ms = parse_double(field, path);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kdeais
