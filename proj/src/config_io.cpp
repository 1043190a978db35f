#include "reachlab/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace reachlab {

namespace {

using nlohmann::json;

const std::set<std::string> kRunKeys = {
    "episodes", "steps", "seed", "seeds", "eval_trials", "eval_interval",
    "eval_interval_trials", "checkpoint_interval", "output_dir",
    "convergence_window", "convergence_fraction", "stdev_mode", "jobs"};
const std::set<std::string> kEnvKeys = {
    "preset", "joint_count", "link_lengths", "joint_axes", "joint_limits",
    "max_joint_speed", "dt", "max_steps", "beta", "workspace", "planar_targets",
    "home_angle"};
const std::set<std::string> kAgentKeys = {
    "algorithm", "algorithms", "gamma", "tau", "batch_size", "buffer_capacity",
    "actor_lr", "critic_lr", "exploration_noise", "temperature_mode", "temperature",
    "temperature_lr", "warmup_steps", "hidden_sizes"};
const std::set<std::string> kRewardKeys = {
    "kind", "kinds", "beta", "har_boundary", "sigma1", "sigma2", "direction_mode",
    "success_bonus"};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object())
    throw ConfigError("section \"" + context + "\" must be an object");
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      throw ConfigError("unknown key \"" + item.key() + "\" in section \"" + context + "\"");
}

double get_number(const json& obj, const std::string& key, double fallback,
                  const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw ConfigError("key \"" + key + "\" in section \"" + context + "\" must be a number");
  return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback,
            const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    throw ConfigError("key \"" + key + "\" in section \"" + context + "\" must be an integer");
  return obj.at(key).get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback,
              const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean())
    throw ConfigError("key \"" + key + "\" in section \"" + context + "\" must be a boolean");
  return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& key, std::string fallback,
                       const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string())
    throw ConfigError("key \"" + key + "\" in section \"" + context + "\" must be a string");
  return obj.at(key).get<std::string>();
}

JointAxis joint_axis_from_string(const std::string& s, const std::string& context) {
  if (s == "x") return JointAxis::x;
  if (s == "y") return JointAxis::y;
  if (s == "z") return JointAxis::z;
  throw ConfigError("bad joint axis \"" + s + "\" in section \"" + context +
                    "\" (expected x, y or z)");
}

const char* to_string(JointAxis a) {
  switch (a) {
    case JointAxis::x: return "x";
    case JointAxis::y: return "y";
    default:           return "z";
  }
}

std::vector<JointAxis> default_axes(int n, bool planar) {
  std::vector<JointAxis> axes;
  axes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    axes.push_back(planar ? JointAxis::z : (i % 2 == 0 ? JointAxis::z : JointAxis::y));
  return axes;
}

}  // namespace

// --- arm ----------------------------------------------------------------------

nlohmann::json arm_config_to_json(const ArmConfig& cfg) {
  json j;
  j["joint_count"] = cfg.joint_count;
  j["link_lengths"] = cfg.link_lengths;
  std::vector<std::string> axes;
  for (JointAxis a : cfg.joint_axes) axes.emplace_back(to_string(a));
  j["joint_axes"] = axes;
  json limits = json::array();
  for (const auto& [lo, hi] : cfg.joint_limits) limits.push_back({lo, hi});
  j["joint_limits"] = limits;
  j["max_joint_speed"] = cfg.max_joint_speed;
  j["dt"] = cfg.dt;
  j["max_steps"] = cfg.max_steps;
  j["beta"] = cfg.beta;
  j["workspace"] = {cfg.workspace_min_fraction, cfg.workspace_max_fraction};
  j["planar_targets"] = cfg.planar_targets;
  j["home_angle"] = cfg.home_angle;
  return j;
}

ArmConfig arm_config_from_json(const nlohmann::json& j, const std::string& context) {
  check_keys(j, kEnvKeys, context);

  ArmConfig cfg;
  const std::string preset = get_string(j, "preset", "arm6", context);
  if (preset == "arm6") {
    cfg = ArmConfig::spatial_6dof();
  } else if (preset == "planar2") {
    cfg = ArmConfig::planar_2dof();
  } else {
    throw ConfigError("unknown env preset \"" + preset + "\" (expected arm6 or planar2)");
  }

  cfg.planar_targets = get_bool(j, "planar_targets", cfg.planar_targets, context);
  if (j.contains("joint_count")) {
    const int n = get_int(j, "joint_count", cfg.joint_count, context);
    if (n < 2) throw ConfigError("joint_count must be >= 2");
    cfg.joint_count = n;
    cfg.link_lengths.assign(static_cast<std::size_t>(n), 1.0 / n);
    cfg.joint_axes = default_axes(n, cfg.planar_targets);
    cfg.joint_limits.assign(static_cast<std::size_t>(n), {-M_PI, M_PI});
  }
  const auto n = static_cast<std::size_t>(cfg.joint_count);
  if (j.contains("link_lengths")) {
    const auto& arr = j.at("link_lengths");
    if (!arr.is_array() || arr.size() != n)
      throw ConfigError("link_lengths must be an array of joint_count numbers");
    cfg.link_lengths.clear();
    for (const auto& v : arr) cfg.link_lengths.push_back(v.get<double>());
  }
  if (j.contains("joint_axes")) {
    const auto& arr = j.at("joint_axes");
    if (!arr.is_array() || arr.size() != n)
      throw ConfigError("joint_axes must be an array of joint_count axis names");
    cfg.joint_axes.clear();
    for (const auto& v : arr)
      cfg.joint_axes.push_back(joint_axis_from_string(v.get<std::string>(), context));
  }
  if (j.contains("joint_limits")) {
    const auto& arr = j.at("joint_limits");
    if (!arr.is_array() || arr.size() != n)
      throw ConfigError("joint_limits must be an array of joint_count [lo, hi] pairs");
    cfg.joint_limits.clear();
    for (const auto& v : arr) {
      if (!v.is_array() || v.size() != 2)
        throw ConfigError("each joint limit must be a [lo, hi] pair");
      cfg.joint_limits.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
  }
  cfg.max_joint_speed = get_number(j, "max_joint_speed", cfg.max_joint_speed, context);
  cfg.dt = get_number(j, "dt", cfg.dt, context);
  cfg.max_steps = get_int(j, "max_steps", cfg.max_steps, context);
  cfg.beta = get_number(j, "beta", cfg.beta, context);
  if (j.contains("workspace")) {
    const auto& arr = j.at("workspace");
    if (!arr.is_array() || arr.size() != 2)
      throw ConfigError("workspace must be [min_fraction, max_fraction]");
    cfg.workspace_min_fraction = arr[0].get<double>();
    cfg.workspace_max_fraction = arr[1].get<double>();
  }
  cfg.home_angle = get_number(j, "home_angle", cfg.home_angle, context);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("section \"" + context + "\": " + e.what());
  }
  return cfg;
}

// --- agent ---------------------------------------------------------------------

nlohmann::json agent_config_to_json(const AgentConfig& cfg) {
  json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["gamma"] = cfg.gamma;
  j["tau"] = cfg.tau;
  j["batch_size"] = cfg.batch_size;
  j["buffer_capacity"] = cfg.buffer_capacity;
  j["actor_lr"] = cfg.actor_lr;
  j["critic_lr"] = cfg.critic_lr;
  j["exploration_noise"] = cfg.exploration_noise;
  j["temperature_mode"] = cfg.auto_temperature ? "auto" : "fixed";
  j["temperature"] = cfg.temperature;
  j["temperature_lr"] = cfg.temperature_lr;
  j["warmup_steps"] = cfg.warmup_steps;
  j["hidden_sizes"] = cfg.hidden_sizes;
  return j;
}

AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base,
                                   const std::string& context) {
  check_keys(j, kAgentKeys, context);
  AgentConfig cfg = std::move(base);
  if (j.contains("algorithm"))
    cfg.algorithm = algorithm_from_string(get_string(j, "algorithm", "", context));
  cfg.gamma = get_number(j, "gamma", cfg.gamma, context);
  cfg.tau = get_number(j, "tau", cfg.tau, context);
  cfg.batch_size = get_int(j, "batch_size", cfg.batch_size, context);
  cfg.buffer_capacity = get_int(j, "buffer_capacity", cfg.buffer_capacity, context);
  cfg.actor_lr = get_number(j, "actor_lr", cfg.actor_lr, context);
  cfg.critic_lr = get_number(j, "critic_lr", cfg.critic_lr, context);
  cfg.exploration_noise = get_number(j, "exploration_noise", cfg.exploration_noise, context);
  if (j.contains("temperature_mode")) {
    const std::string mode = get_string(j, "temperature_mode", "auto", context);
    if (mode == "auto")
      cfg.auto_temperature = true;
    else if (mode == "fixed")
      cfg.auto_temperature = false;
    else
      throw ConfigError("temperature_mode must be \"auto\" or \"fixed\"");
  }
  cfg.temperature = get_number(j, "temperature", cfg.temperature, context);
  cfg.temperature_lr = get_number(j, "temperature_lr", cfg.temperature_lr, context);
  cfg.warmup_steps = get_int(j, "warmup_steps", cfg.warmup_steps, context);
  if (j.contains("hidden_sizes")) {
    const auto& arr = j.at("hidden_sizes");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("hidden_sizes must be a non-empty array of integers");
    cfg.hidden_sizes.clear();
    for (const auto& v : arr) cfg.hidden_sizes.push_back(v.get<int>());
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("section \"" + context + "\": " + e.what());
  }
  return cfg;
}

// --- reward --------------------------------------------------------------------

nlohmann::json reward_spec_to_json(const RewardSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["beta"] = spec.config.beta;
  j["har_boundary"] = spec.config.har_boundary;
  j["sigma1"] = spec.config.sigma1;
  j["sigma2"] = spec.config.sigma2;
  j["direction_mode"] = to_string(spec.config.direction_mode);
  j["success_bonus"] = spec.config.success_bonus;
  return j;
}

RewardSpec reward_spec_from_json(const nlohmann::json& j, RewardSpec base,
                                 const std::string& context) {
  check_keys(j, kRewardKeys, context);
  RewardSpec spec = base;
  if (j.contains("kind"))
    spec.kind = reward_kind_from_string(get_string(j, "kind", "", context));
  spec.config.beta = get_number(j, "beta", spec.config.beta, context);
  spec.config.har_boundary = get_number(j, "har_boundary", spec.config.har_boundary, context);
  spec.config.sigma1 = get_number(j, "sigma1", spec.config.sigma1, context);
  spec.config.sigma2 = get_number(j, "sigma2", spec.config.sigma2, context);
  if (j.contains("direction_mode"))
    spec.config.direction_mode =
        direction_mode_from_string(get_string(j, "direction_mode", "", context));
  spec.config.success_bonus = get_number(j, "success_bonus", spec.config.success_bonus, context);
  try {
    spec.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("section \"" + context + "\": " + e.what());
  }
  return spec;
}

// --- run ------------------------------------------------------------------------

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["episodes"] = cfg.episodes;
  j["steps"] = cfg.steps_per_episode;
  j["seed"] = cfg.seed;
  j["eval_trials"] = cfg.eval_trials;
  j["eval_interval"] = cfg.eval_interval;
  j["eval_interval_trials"] = cfg.eval_interval_trials;
  j["checkpoint_interval"] = cfg.checkpoint_interval;
  j["convergence_window"] = cfg.convergence_window;
  j["convergence_fraction"] = cfg.convergence_fraction;
  j["stdev_mode"] = to_string(cfg.stdev_mode);
  j["agent"] = agent_config_to_json(cfg.agent);
  j["env"] = arm_config_to_json(cfg.arm);
  j["reward"] = reward_spec_to_json(cfg.reward);
  return j;
}

std::string run_config_hash(const RunConfig& cfg) {
  const std::string canonical = run_config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- experiment files --------------------------------------------------------------

Experiment parse_experiment(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment file must be a JSON object");
  check_keys(doc, {"run", "env", "agent", "reward"}, "experiment");
  const json run = doc.value("run", json::object());
  const json env = doc.value("env", json::object());
  const json agent = doc.value("agent", json::object());
  const json reward = doc.value("reward", json::object());
  check_keys(run, kRunKeys, "run");
  check_keys(agent, kAgentKeys, "agent");
  check_keys(reward, kRewardKeys, "reward");

  RunConfig proto;
  proto.arm = arm_config_from_json(env, "env");
  proto.agent = agent_config_from_json(agent, AgentConfig{}, "agent");
  {
    RewardSpec base;
    base.config.beta = proto.arm.beta;  // keep success tests aligned by default
    proto.reward = reward_spec_from_json(reward, base, "reward");
  }
  proto.episodes = get_int(run, "episodes", proto.episodes, "run");
  proto.steps_per_episode = get_int(run, "steps", proto.steps_per_episode, "run");
  proto.eval_trials = get_int(run, "eval_trials", proto.eval_trials, "run");
  proto.eval_interval = get_int(run, "eval_interval", proto.eval_interval, "run");
  proto.eval_interval_trials =
      get_int(run, "eval_interval_trials", proto.eval_interval_trials, "run");
  proto.checkpoint_interval =
      get_int(run, "checkpoint_interval", proto.checkpoint_interval, "run");
  proto.convergence_window =
      get_int(run, "convergence_window", proto.convergence_window, "run");
  proto.convergence_fraction =
      get_number(run, "convergence_fraction", proto.convergence_fraction, "run");
  if (run.contains("stdev_mode")) {
    try {
      proto.stdev_mode = stdev_mode_from_string(get_string(run, "stdev_mode", "", "run"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  // grid axes
  std::vector<Algorithm> algorithms;
  if (agent.contains("algorithms")) {
    if (agent.contains("algorithm"))
      throw ConfigError("give either \"algorithm\" or \"algorithms\", not both");
    for (const auto& v : agent.at("algorithms"))
      algorithms.push_back(algorithm_from_string(v.get<std::string>()));
  } else {
    algorithms.push_back(proto.agent.algorithm);
  }
  std::vector<RewardKind> kinds;
  if (reward.contains("kinds")) {
    if (reward.contains("kind"))
      throw ConfigError("give either \"kind\" or \"kinds\", not both");
    for (const auto& v : reward.at("kinds"))
      kinds.push_back(reward_kind_from_string(v.get<std::string>()));
  } else {
    kinds.push_back(proto.reward.kind);
  }
  std::vector<std::uint64_t> seeds;
  if (run.contains("seeds")) {
    if (run.contains("seed"))
      throw ConfigError("give either \"seed\" or \"seeds\", not both");
    for (const auto& v : run.at("seeds")) seeds.push_back(v.get<std::uint64_t>());
  } else if (run.contains("seed")) {
    seeds.push_back(run.at("seed").get<std::uint64_t>());
  } else {
    seeds.push_back(0);
  }
  if (algorithms.empty() || kinds.empty() || seeds.empty())
    throw ConfigError("empty grid axis (algorithms / kinds / seeds)");

  Experiment exp;
  exp.jobs = get_int(run, "jobs", 1, "run");
  if (exp.jobs < 1) throw ConfigError("jobs must be >= 1");
  exp.output_root = get_string(run, "output_dir", "", "run");

  const bool single = algorithms.size() == 1 && kinds.size() == 1 && seeds.size() == 1;
  for (Algorithm algo : algorithms) {
    for (RewardKind kind : kinds) {
      for (std::uint64_t seed : seeds) {
        RunConfig rc = proto;
        rc.agent.algorithm = algo;
        rc.reward.kind = kind;
        rc.seed = seed;
        if (!exp.output_root.empty())
          rc.output_dir = single ? exp.output_root
                                 : exp.output_root + "/" + run_dir_name(algo, kind, seed);
        try {
          rc.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        exp.runs.push_back(std::move(rc));
      }
    }
  }
  return exp;
}

namespace {

json parse_override_value(const std::string& text) {
  const json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return json(text);  // plain string
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must be key=value: \"" + assignment + "\"");
  std::string key = assignment.substr(0, eq);
  const json value = parse_override_value(assignment.substr(eq + 1));

  std::string section;
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
    if (section != "run" && section != "env" && section != "agent" && section != "reward")
      throw ConfigError("override section must be run/env/agent/reward: \"" + section + "\"");
  } else {
    std::vector<std::string> hits;
    if (kRunKeys.count(key)) hits.push_back("run");
    if (kEnvKeys.count(key)) hits.push_back("env");
    if (kAgentKeys.count(key)) hits.push_back("agent");
    if (kRewardKeys.count(key)) hits.push_back("reward");
    if (hits.empty()) throw ConfigError("unknown override key \"" + key + "\"");
    if (hits.size() > 1)
      throw ConfigError("override key \"" + key +
                        "\" is ambiguous; qualify it as section.key");
    section = hits.front();
  }
  if (!doc.contains(section)) doc[section] = json::object();
  // a scalar override replaces a grid axis
  if (key == "seed") doc[section].erase("seeds");
  if (key == "seeds") doc[section].erase("seed");
  if (key == "algorithm") doc[section].erase("algorithms");
  if (key == "algorithms") doc[section].erase("algorithm");
  if (key == "kind") doc[section].erase("kinds");
  if (key == "kinds") doc[section].erase("kind");
  doc[section][key] = value;
}

}  // namespace

Experiment load_experiment(const std::string& path,
                           const std::vector<std::string>& overrides,
                           const std::string& output_root_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("experiment file " + path + ": " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  if (!output_root_override.empty()) {
    if (!doc.contains("run")) doc["run"] = json::object();
    doc["run"]["output_dir"] = output_root_override;
  }
  return parse_experiment(doc);
}

}  // namespace reachlab
