#include "reachlab/checkpoint.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "reachlab/config_io.hpp"
#include "reachlab/scripted.hpp"

namespace reachlab {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "reachlab-checkpoint";
constexpr int kVersion = 1;

json mlp_to_json(const Mlp& net) {
  json j;
  j["layer_sizes"] = net.layer_sizes;
  std::vector<std::string> acts;
  for (Activation a : net.hidden_activations) acts.emplace_back(to_string(a));
  j["hidden_activations"] = acts;
  j["output_activation"] = to_string(net.output_activation);
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    weights.push_back(std::vector<double>(net.weights[l].data(),
                                          net.weights[l].data() + net.weights[l].size()));
    biases.push_back(std::vector<double>(net.biases[l].data(),
                                         net.biases[l].data() + net.biases[l].size()));
  }
  j["weights"] = weights;
  j["biases"] = biases;
  return j;
}

Mlp mlp_from_json(const json& j) {
  Mlp net;
  net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  for (const auto& a : j.at("hidden_activations"))
    net.hidden_activations.push_back(activation_from_string(a.get<std::string>()));
  net.output_activation =
      output_activation_from_string(j.at("output_activation").get<std::string>());
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() + 1 != net.layer_sizes.size() || biases.size() != weights.size())
    throw CheckpointError("network layer count mismatch");
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const auto w = weights[l].get<std::vector<double>>();
    const auto b = biases[l].get<std::vector<double>>();
    const auto rows = static_cast<Eigen::Index>(net.layer_sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(net.layer_sizes[l]);
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != rows)
      throw CheckpointError("network parameter size mismatch");
    MatX wm(rows, cols);
    std::copy(w.begin(), w.end(), wm.data());
    net.weights.push_back(std::move(wm));
    net.biases.push_back(Eigen::Map<const VecX>(b.data(), rows));
  }
  net.check_shapes();
  return net;
}

json adam_to_json(const AdamState& s) {
  json j;
  j["step"] = s.step;
  j["beta1"] = s.beta1;
  j["beta2"] = s.beta2;
  j["epsilon"] = s.epsilon;
  json mw = json::array(), vw = json::array(), mb = json::array(), vb = json::array();
  for (std::size_t l = 0; l < s.m_w.size(); ++l) {
    mw.push_back(std::vector<double>(s.m_w[l].data(), s.m_w[l].data() + s.m_w[l].size()));
    vw.push_back(std::vector<double>(s.v_w[l].data(), s.v_w[l].data() + s.v_w[l].size()));
    mb.push_back(std::vector<double>(s.m_b[l].data(), s.m_b[l].data() + s.m_b[l].size()));
    vb.push_back(std::vector<double>(s.v_b[l].data(), s.v_b[l].data() + s.v_b[l].size()));
  }
  j["m_w"] = mw;
  j["v_w"] = vw;
  j["m_b"] = mb;
  j["v_b"] = vb;
  return j;
}

AdamState adam_from_json(const json& j, const Mlp& net) {
  AdamState s = make_adam_state(net);
  s.step = j.at("step").get<long>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto mw = j.at("m_w")[l].get<std::vector<double>>();
    const auto vw = j.at("v_w")[l].get<std::vector<double>>();
    const auto mb = j.at("m_b")[l].get<std::vector<double>>();
    const auto vb = j.at("v_b")[l].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(mw.size()) != s.m_w[l].size() ||
        static_cast<Eigen::Index>(mb.size()) != s.m_b[l].size())
      throw CheckpointError("optimizer state size mismatch");
    std::copy(mw.begin(), mw.end(), s.m_w[l].data());
    std::copy(vw.begin(), vw.end(), s.v_w[l].data());
    std::copy(mb.begin(), mb.end(), s.m_b[l].data());
    std::copy(vb.begin(), vb.end(), s.v_b[l].data());
  }
  return s;
}

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json common_header(const Agent& agent, const ArmConfig& arm, const RewardSpec& reward) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["obs_layout"] = agent.obs_layout();
  j["obs_dim"] = agent.obs_dim();
  j["act_dim"] = agent.act_dim();
  j["steps_observed"] = agent.steps_observed();
  j["env"] = arm_config_to_json(arm);
  j["reward"] = reward_spec_to_json(reward);
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open for writing: " + path);
  out << j.dump() << '\n';
}

}  // namespace

void save_checkpoint(const std::string& path, const Agent& agent, const ArmConfig& arm,
                     const RewardSpec& reward) {
  if (const auto* ddpg = dynamic_cast<const DdpgAgent*>(&agent)) {
    json j = common_header(agent, arm, reward);
    j["algorithm"] = "ddpg";
    j["agent_config"] = agent_config_to_json(ddpg->config());
    j["config_hash"] = fnv_hex(j["agent_config"].dump());
    j["rng"] = ddpg->rng().serialize();
    const DdpgState& s = ddpg->net_state();
    j["networks"] = {{"actor", mlp_to_json(s.actor)},
                     {"critic", mlp_to_json(s.critic)},
                     {"target_actor", mlp_to_json(s.target_actor)},
                     {"target_critic", mlp_to_json(s.target_critic)}};
    j["optimizers"] = {{"actor", adam_to_json(s.actor_opt)},
                       {"critic", adam_to_json(s.critic_opt)}};
    write_json(path, j);
    return;
  }
  if (const auto* sac = dynamic_cast<const SacAgent*>(&agent)) {
    json j = common_header(agent, arm, reward);
    j["algorithm"] = "sac";
    j["agent_config"] = agent_config_to_json(sac->config());
    j["config_hash"] = fnv_hex(j["agent_config"].dump());
    j["rng"] = sac->rng().serialize();
    const SacState& s = sac->net_state();
    j["networks"] = {{"actor", mlp_to_json(s.actor)},
                     {"critic1", mlp_to_json(s.critic1)},
                     {"critic2", mlp_to_json(s.critic2)},
                     {"target_critic1", mlp_to_json(s.target_critic1)},
                     {"target_critic2", mlp_to_json(s.target_critic2)}};
    j["optimizers"] = {{"actor", adam_to_json(s.actor_opt)},
                       {"critic1", adam_to_json(s.critic1_opt)},
                       {"critic2", adam_to_json(s.critic2_opt)}};
    j["temperature"] = {{"log_alpha", s.log_alpha},
                        {"m", s.alpha_m},
                        {"v", s.alpha_v},
                        {"step", s.alpha_step}};
    write_json(path, j);
    return;
  }
  if (dynamic_cast<const OracleReachAgent*>(&agent) != nullptr) {
    save_scripted_checkpoint(path, "oracle", arm, reward);
    return;
  }
  if (dynamic_cast<const ZeroAgent*>(&agent) != nullptr) {
    save_scripted_checkpoint(path, "zero", arm, reward);
    return;
  }
  throw CheckpointError("save_checkpoint: unsupported agent type");
}

void save_scripted_checkpoint(const std::string& path, const std::string& policy,
                              const ArmConfig& arm, const RewardSpec& reward) {
  if (policy != "oracle" && policy != "zero")
    throw CheckpointError("scripted policy must be \"oracle\" or \"zero\"");
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["algorithm"] = "scripted";
  j["policy"] = policy;
  j["obs_layout"] = "sincos_qvel_p_t_tp/v1/n=" + std::to_string(arm.joint_count);
  j["obs_dim"] = 3 * arm.joint_count + 9;
  j["act_dim"] = arm.joint_count;
  j["env"] = arm_config_to_json(arm);
  j["reward"] = reward_spec_to_json(reward);
  write_json(path, j);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CheckpointError("corrupt or truncated checkpoint " + path + ": " + e.what());
  }
  try {
    if (j.value("format", "") != kFormat)
      throw CheckpointError("not a reachlab checkpoint: " + path);
    if (j.at("version").get<int>() != kVersion)
      throw CheckpointError("unsupported checkpoint version in " + path);

    LoadedCheckpoint loaded;
    loaded.arm = arm_config_from_json(j.at("env"), "checkpoint env");
    loaded.reward = reward_spec_from_json(j.at("reward"), RewardSpec{}, "checkpoint reward");

    const std::string algorithm = j.at("algorithm").get<std::string>();
    const std::string obs_layout = j.at("obs_layout").get<std::string>();
    const int obs_dim = j.at("obs_dim").get<int>();
    const int act_dim = j.at("act_dim").get<int>();

    if (algorithm == "scripted") {
      const std::string policy = j.at("policy").get<std::string>();
      if (policy == "oracle")
        loaded.agent = std::make_unique<OracleReachAgent>(loaded.arm);
      else if (policy == "zero")
        loaded.agent = std::make_unique<ZeroAgent>(obs_dim, act_dim, obs_layout);
      else
        throw CheckpointError("unknown scripted policy \"" + policy + "\"");
      return loaded;
    }

    const AgentConfig cfg =
        agent_config_from_json(j.at("agent_config"), AgentConfig{}, "checkpoint agent");
    const Rng rng = Rng::deserialize(j.at("rng").get<std::string>());
    const auto steps = j.at("steps_observed").get<std::int64_t>();
    const json& nets = j.at("networks");
    const json& opts = j.at("optimizers");

    if (algorithm == "ddpg") {
      DdpgState s;
      s.actor = mlp_from_json(nets.at("actor"));
      s.critic = mlp_from_json(nets.at("critic"));
      s.target_actor = mlp_from_json(nets.at("target_actor"));
      s.target_critic = mlp_from_json(nets.at("target_critic"));
      s.actor_opt = adam_from_json(opts.at("actor"), s.actor);
      s.critic_opt = adam_from_json(opts.at("critic"), s.critic);
      loaded.agent = std::make_unique<DdpgAgent>(cfg, obs_dim, act_dim, obs_layout,
                                                 std::move(s), rng, steps);
      return loaded;
    }
    if (algorithm == "sac") {
      SacState s;
      s.actor = mlp_from_json(nets.at("actor"));
      s.critic1 = mlp_from_json(nets.at("critic1"));
      s.critic2 = mlp_from_json(nets.at("critic2"));
      s.target_critic1 = mlp_from_json(nets.at("target_critic1"));
      s.target_critic2 = mlp_from_json(nets.at("target_critic2"));
      s.actor_opt = adam_from_json(opts.at("actor"), s.actor);
      s.critic1_opt = adam_from_json(opts.at("critic1"), s.critic1);
      s.critic2_opt = adam_from_json(opts.at("critic2"), s.critic2);
      const json& temp = j.at("temperature");
      s.log_alpha = temp.at("log_alpha").get<double>();
      s.alpha_m = temp.at("m").get<double>();
      s.alpha_v = temp.at("v").get<double>();
      s.alpha_step = temp.at("step").get<long>();
      loaded.agent = std::make_unique<SacAgent>(cfg, obs_dim, act_dim, obs_layout,
                                                std::move(s), rng, steps);
      return loaded;
    }
    throw CheckpointError("unknown algorithm \"" + algorithm + "\" in " + path);
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path + ": " + e.what());
  }
}

}  // namespace reachlab
