#include "kdeais/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kdeais/errors.hpp"
#include "kdeais/limit_states.hpp"

namespace kdeais {

using nlohmann::json;

namespace {

Marginal marginal_from_json(const json& j) {
  if (!j.is_object()) throw config_error("input entry must be an object");
  if (!j.contains("dist")) throw config_error("input entry missing 'dist'");
  const std::string dist = j.at("dist").get<std::string>();
  std::set<std::string> allowed{"dist"};
  auto num = [&](const char* key) {
    allowed.insert(key);
    if (!j.contains(key)) throw config_error(std::string("input entry missing '") + key + "'");
    return j.at(key).get<double>();
  };
  Marginal out = [&] {
    if (dist == "uniform") return Marginal::uniform(num("lo"), num("hi"));
    if (dist == "normal") return Marginal::normal(num("mean"), num("sd"));
    if (dist == "lognormal") return Marginal::lognormal(num("mu_log"), num("sigma_log"));
    if (dist == "truncated_normal") {
      return Marginal::truncated_normal(num("mean"), num("sd"), num("lo"), num("hi"));
    }
    throw config_error("unknown dist kind: " + dist);
  }();
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) throw config_error("unknown key in input entry: " + key);
  }
  return out;
}

json marginal_to_json(const Marginal& m) {
  json j;
  switch (m.kind()) {
    case MarginalKind::kUniform:
      j = {{"dist", "uniform"}, {"lo", m.a()}, {"hi", m.b()}};
      break;
    case MarginalKind::kNormal:
      j = {{"dist", "normal"}, {"mean", m.a()}, {"sd", m.b()}};
      break;
    case MarginalKind::kLognormal:
      j = {{"dist", "lognormal"}, {"mu_log", m.a()}, {"sigma_log", m.b()}};
      break;
    case MarginalKind::kTruncatedNormal:
      j = {{"dist", "truncated_normal"},
           {"mean", m.a()},
           {"sd", m.b()},
           {"lo", m.lo()},
           {"hi", m.hi()}};
      break;
  }
  return j;
}

}  // namespace

Experiment parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config root must be an object");
  if (!j.contains("benchmark")) throw config_error("config missing required key 'benchmark'");

  RunConfig cfg;
  cfg.benchmark = j.at("benchmark").get<std::string>();
  const auto oracle = make_limit_state(cfg.benchmark);  // validates the name
  const BenchmarkDefaults defaults = oracle->defaults();
  cfg.threshold = defaults.threshold;
  cfg.seed_points = defaults.seed_points;
  cfg.iterations = defaults.iterations;
  cfg.batch_size = defaults.batch_size;

  const std::set<std::string> known{
      "benchmark",        "threshold",          "seed_points",
      "iterations",       "batch_size",         "pilot_size",
      "alpha",            "bandwidth",          "bandwidth_rule",
      "exploration_c",    "exploration_gamma",  "mf_samples_final",
      "mf_samples_online", "mf_use_expensive_points", "estimators",
      "seed",             "replications",       "baseline_split",
      "baseline_exploration", "record_wall_time", "gp",
      "input"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) throw config_error("unknown config key: " + key);
  }

  try {
    if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<double>();
    if (j.contains("seed_points")) cfg.seed_points = j.at("seed_points").get<int>();
    if (j.contains("iterations")) cfg.iterations = j.at("iterations").get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
    if (j.contains("pilot_size")) cfg.pilot_size = j.at("pilot_size").get<long>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("bandwidth")) cfg.bandwidth = j.at("bandwidth").get<double>();
    if (j.contains("bandwidth_rule")) {
      const std::string rule = j.at("bandwidth_rule").get<std::string>();
      if (rule == "normal_reference") {
        cfg.bandwidth_normal_reference = true;
      } else if (rule == "fixed") {
        cfg.bandwidth_normal_reference = false;
      } else {
        throw config_error("unknown bandwidth_rule: " + rule);
      }
    }
    if (j.contains("exploration_c")) cfg.exploration_c = j.at("exploration_c").get<double>();
    if (j.contains("exploration_gamma")) {
      cfg.exploration_gamma = j.at("exploration_gamma").get<double>();
    }
    if (j.contains("mf_samples_final")) cfg.mf_samples_final = j.at("mf_samples_final").get<long>();
    if (j.contains("mf_samples_online")) {
      cfg.mf_samples_online = j.at("mf_samples_online").get<long>();
    }
    if (j.contains("mf_use_expensive_points")) {
      cfg.mf_use_expensive_points = j.at("mf_use_expensive_points").get<bool>();
    }
    if (j.contains("estimators")) {
      cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("baseline_split")) cfg.baseline_split = j.at("baseline_split").get<double>();
    if (j.contains("baseline_exploration")) {
      cfg.baseline_exploration = j.at("baseline_exploration").get<double>();
    }
    if (j.contains("record_wall_time")) cfg.record_wall_time = j.at("record_wall_time").get<bool>();

    if (j.contains("gp")) {
      const json& g = j.at("gp");
      const std::set<std::string> gp_known{"kernel",       "multistarts", "max_evals_per_start",
                                           "nugget",       "max_nugget",  "full_refit_below",
                                           "refit_growth"};
      for (const auto& [key, value] : g.items()) {
        (void)value;
        if (!gp_known.contains(key)) throw config_error("unknown gp key: " + key);
      }
      if (g.contains("kernel")) cfg.gp.kernel = g.at("kernel").get<std::string>();
      if (g.contains("multistarts")) cfg.gp.multistarts = g.at("multistarts").get<int>();
      if (g.contains("max_evals_per_start")) {
        cfg.gp.max_evals_per_start = g.at("max_evals_per_start").get<int>();
      }
      if (g.contains("nugget")) cfg.gp.nugget = g.at("nugget").get<double>();
      if (g.contains("max_nugget")) cfg.gp.max_nugget = g.at("max_nugget").get<double>();
      if (g.contains("full_refit_below")) {
        cfg.gp.full_refit_below = g.at("full_refit_below").get<int>();
      }
      if (g.contains("refit_growth")) cfg.gp.refit_growth = g.at("refit_growth").get<double>();
    }

    if (j.contains("input")) {
      const json& in = j.at("input");
      if (!in.is_array() || in.empty()) throw config_error("'input' must be a non-empty array");
      std::vector<Marginal> marginals;
      for (const auto& entry : in) marginals.push_back(marginal_from_json(entry));
      if (static_cast<int>(marginals.size()) != oracle->dim()) {
        throw config_error("'input' must declare exactly one marginal per benchmark dimension");
      }
      cfg.input_override = std::move(marginals);
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("config value has the wrong type: ") + e.what());
  }

  cfg.validate();
  return Experiment{cfg, resolve_input_density(cfg)};
}

Experiment parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["benchmark"] = cfg.benchmark;
  j["threshold"] = cfg.threshold;
  j["seed_points"] = cfg.seed_points;
  j["iterations"] = cfg.iterations;
  j["batch_size"] = cfg.batch_size;
  j["pilot_size"] = cfg.pilot_size;
  j["alpha"] = cfg.alpha;
  j["bandwidth"] = cfg.bandwidth;
  j["bandwidth_rule"] = cfg.bandwidth_normal_reference ? "normal_reference" : "fixed";
  j["exploration_c"] = cfg.exploration_c;
  j["exploration_gamma"] = cfg.exploration_gamma;
  j["mf_samples_final"] = cfg.mf_samples_final;
  j["mf_samples_online"] = cfg.mf_samples_online;
  j["mf_use_expensive_points"] = cfg.mf_use_expensive_points;
  j["estimators"] = cfg.estimators;
  j["seed"] = cfg.seed;
  j["replications"] = cfg.replications;
  j["baseline_split"] = cfg.baseline_split;
  j["baseline_exploration"] = cfg.baseline_exploration;
  j["record_wall_time"] = cfg.record_wall_time;
  j["gp"] = {{"kernel", cfg.gp.kernel},
             {"multistarts", cfg.gp.multistarts},
             {"max_evals_per_start", cfg.gp.max_evals_per_start},
             {"nugget", cfg.gp.nugget},
             {"max_nugget", cfg.gp.max_nugget},
             {"full_refit_below", cfg.gp.full_refit_below},
             {"refit_growth", cfg.gp.refit_growth}};
  if (cfg.input_override.has_value()) {
    json in = json::array();
    for (const auto& m : *cfg.input_override) in.push_back(marginal_to_json(m));
    j["input"] = in;
  }
  return j.dump(2);
}

InputDensity resolve_input_density(const RunConfig& cfg) {
  if (cfg.input_override.has_value()) return InputDensity(*cfg.input_override);
  return make_limit_state(cfg.benchmark)->default_input_density();
}

}  // namespace kdeais
