#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reachlab/harness.hpp"

namespace reachlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json arm_config_to_json(const ArmConfig& cfg);
ArmConfig arm_config_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json agent_config_to_json(const AgentConfig& cfg);
AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base,
                                   const std::string& context);

nlohmann::json reward_spec_to_json(const RewardSpec& spec);
RewardSpec reward_spec_from_json(const nlohmann::json& j, RewardSpec base,
                                 const std::string& context);

nlohmann::json run_config_to_json(const RunConfig& cfg);
std::string run_config_hash(const RunConfig& cfg);

// One experiment document: a single run or a sweep grid over
// {algorithms} x {reward kinds} x {seeds}. Parsing is strict: unknown keys,
// unknown enum values and out-of-range values are hard errors.
struct Experiment {
  std::vector<RunConfig> runs;
  int jobs = 1;
  std::string output_root;
};

Experiment parse_experiment(const nlohmann::json& doc);

// Reads the file, applies key=value overrides (dotted "section.key" or a bare
// key that is unique across sections), honors an output-root override, then
// parses. Override values are parsed as JSON with plain-string fallback.
Experiment load_experiment(const std::string& path,
                           const std::vector<std::string>& overrides,
                           const std::string& output_root_override);

}  // namespace reachlab
