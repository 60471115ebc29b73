#pragma once

#include <string>

#include "kdeais/input_density.hpp"
#include "kdeais/run_config.hpp"

namespace kdeais {

struct Experiment {
  RunConfig config;
  InputDensity input;  // benchmark default unless overridden in the file
};

/// Parses a JSON experiment file. Unknown keys are rejected (strict schema);
/// missing keys take the benchmark's defaults. All RunConfig invariants are
/// re-validated. Throws config_error with the offending key on failure.
Experiment parse_config_file(const std::string& path);
Experiment parse_config_text(const std::string& json_text);

/// Inverse of parsing: parse(serialize(config)) == config.
std::string serialize_config(const RunConfig& config);

/// Resolves the effective input density for a config (override or default).
InputDensity resolve_input_density(const RunConfig& config);

}  // namespace kdeais
