#ifndef RACBF_CONFIG_HPP
#define RACBF_CONFIG_HPP

#include <string>

#include <json.hpp>

#include "racbf/harness.hpp"

namespace racbf {

/// Parses a run configuration. Missing keys fall back to the case-study
/// defaults; unknown keys are rejected with a diagnostic naming the key.
RunConfig config_from_json(const nlohmann::json& j);

/// Full resolved snapshot; feeding it back through config_from_json
/// reproduces the configuration exactly.
nlohmann::json config_to_json(const RunConfig& cfg);

RunConfig load_config_file(const std::string& path);

const char* to_string(ScenarioMode mode);
ScenarioMode scenario_mode_from_string(const std::string& name);

}  // namespace racbf

#endif  // RACBF_CONFIG_HPP
