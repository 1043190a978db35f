#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "reachlab/agents.hpp"
#include "reachlab/checkpoint.hpp"
#include "reachlab/rng.hpp"

using namespace reachlab;

namespace {

VecX random_vec(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

Transition make_transition(Rng& rng, int obs_dim, int act_dim, double reward,
                           bool success) {
  Transition t;
  t.observation = random_vec(obs_dim, rng);
  t.action = random_vec(act_dim, rng);
  t.reward = reward;
  t.next_observation = random_vec(obs_dim, rng);
  t.done = success;
  t.success = success;
  return t;
}

AgentConfig small_config(Algorithm algo, int warmup = 32, int batch = 16) {
  AgentConfig cfg;
  cfg.algorithm = algo;
  cfg.warmup_steps = warmup;
  cfg.batch_size = batch;
  cfg.buffer_capacity = 4096;
  cfg.hidden_sizes = {16, 16};
  return cfg;
}

// chi-square critical value via the Wilson-Hilferty transform
double chi_square_critical(int df, double z) {
  const double d = static_cast<double>(df);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("replay buffer ring semantics") {
  ReplayBuffer buffer(4);
  Rng rng(0);
  for (int i = 0; i < 6; ++i) {
    StoredTransition t;
    t.observation = VecX::Constant(2, i);
    t.action = VecX::Zero(1);
    t.next_observation = VecX::Zero(2);
    t.reward = i;
    buffer.push(t);
  }
  CHECK(buffer.size() == 4);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const double r = buffer.at(i).reward;
    CHECK(r >= 2.0);  // the two oldest were overwritten
    CHECK(r <= 5.0);
  }
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
  ReplayBuffer small(8);
  CHECK_THROWS_AS(small.sample_indices(1, rng), std::invalid_argument);
}

TEST_CASE("replay sampling is uniform (chi-square)") {
  const std::size_t k = 50;
  ReplayBuffer buffer(k);
  for (std::size_t i = 0; i < k; ++i) {
    StoredTransition t;
    t.observation = VecX::Zero(1);
    t.action = VecX::Zero(1);
    t.next_observation = VecX::Zero(1);
    buffer.push(t);
  }
  Rng rng(314);
  const int draws = 50000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < draws; ++i)
    for (std::size_t idx : buffer.sample_indices(1, rng)) counts[idx]++;
  const double expected = static_cast<double>(draws) / k;
  double chi2 = 0.0;
  for (int c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  // p > 0.001 <=> statistic below the 0.999 quantile of chi2(k-1)
  CHECK(chi2 < chi_square_critical(static_cast<int>(k) - 1, 3.090232));
}

TEST_CASE("actions are bounded and greedy is deterministic") {
  Rng rng(1);
  for (Algorithm algo : {Algorithm::ddpg, Algorithm::sac}) {
    auto agent = make_agent(small_config(algo, 4), 6, 3, "layout", 7);
    for (int i = 0; i < 50; ++i) {
      const VecX obs = random_vec(6, rng, -2.0, 2.0);
      const VecX greedy1 = agent->act_greedy(obs);
      const VecX greedy2 = agent->act_greedy(obs);
      CHECK(greedy1 == greedy2);
      CHECK(greedy1.cwiseAbs().maxCoeff() <= 1.0);
      const VecX explored = agent->act(obs, true);
      CHECK(explored.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("freshly initialized policies act near zero") {
  Rng rng(2);
  for (Algorithm algo : {Algorithm::ddpg, Algorithm::sac}) {
    auto agent = make_agent(small_config(algo), 15, 2, "layout", 99);
    for (int i = 0; i < 100; ++i)
      CHECK(agent->act_greedy(random_vec(15, rng)).cwiseAbs().maxCoeff() < 0.1);
  }
}

TEST_CASE("no parameter changes during warmup") {
  Rng rng(3);
  for (Algorithm algo : {Algorithm::ddpg, Algorithm::sac}) {
    auto agent = make_agent(small_config(algo, 32, 16), 4, 2, "layout", 5);
    const std::uint64_t fresh = agent->parameter_hash();
    for (int i = 0; i < 32; ++i) {
      const UpdateDiagnostics diag =
          agent->observe_and_update(make_transition(rng, 4, 2, 0.1, false));
      CHECK_FALSE(diag.updated);
    }
    CHECK(agent->parameter_hash() == fresh);
    const UpdateDiagnostics diag =
        agent->observe_and_update(make_transition(rng, 4, 2, 0.1, false));
    CHECK(diag.updated);
    CHECK(agent->parameter_hash() != fresh);
    CHECK(std::isfinite(diag.critic_loss));
    CHECK(std::isfinite(diag.actor_loss));
  }
}

TEST_CASE("ddpg critic targets follow the Bellman arithmetic") {
  Rng rng(4);
  DdpgAgent agent(small_config(Algorithm::ddpg), 4, 2, "layout", 11);
  std::vector<StoredTransition> batch;
  for (int i = 0; i < 5; ++i) {
    StoredTransition t;
    t.observation = random_vec(4, rng);
    t.action = random_vec(2, rng);
    t.next_observation = random_vec(4, rng);
    t.reward = rng.uniform(-2.0, 2.0);
    t.terminal = (i % 2 == 0);
    batch.push_back(t);
  }
  const VecX targets = agent.critic_targets(batch);
  const DdpgState& s = agent.net_state();
  for (int i = 0; i < 5; ++i) {
    const auto& t = batch[static_cast<std::size_t>(i)];
    // standalone recomputation through the target networks
    const VecX a2 = mlp_forward(s.target_actor, t.next_observation);
    VecX sa(6);
    sa << t.next_observation, a2;
    const double q2 = mlp_forward(s.target_critic, sa)(0);
    const double expected =
        t.reward + agent.config().gamma * (t.terminal ? 0.0 : 1.0) * q2;
    CHECK(std::abs(targets(i) - expected) <= 1e-12);
  }
}

TEST_CASE("sac critic targets use the twin minimum and the entropy term") {
  Rng rng(5);
  AgentConfig cfg = small_config(Algorithm::sac);
  SacAgent agent(cfg, 4, 2, "layout", 12);

  // skew one target critic so the two targets disagree decisively
  SacState skewed = agent.net_state();
  skewed.target_critic2.biases.back()(0) -= 100.0;
  SacAgent doctored(cfg, 4, 2, "layout", skewed, agent.rng(), 0);

  std::vector<StoredTransition> batch;
  for (int i = 0; i < 4; ++i) {
    StoredTransition t;
    t.observation = random_vec(4, rng);
    t.action = random_vec(2, rng);
    t.next_observation = random_vec(4, rng);
    t.reward = rng.uniform(-1.0, 1.0);
    t.terminal = false;
    batch.push_back(t);
  }
  MatX noise(2, 4);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();

  const VecX targets = doctored.critic_targets(batch, noise);
  const SacState& s = doctored.net_state();
  const double alpha = doctored.alpha();
  for (int i = 0; i < 4; ++i) {
    const auto& t = batch[static_cast<std::size_t>(i)];
    // independent recomputation of the squashed-Gaussian next action
    const VecX heads = mlp_forward(s.actor, t.next_observation);
    double logpi = 0.0;
    VecX a2(2);
    for (int k = 0; k < 2; ++k) {
      const double mean = heads(k);
      const double log_std = std::clamp(heads(2 + k), -20.0, 2.0);
      const double eps = noise(k, i);
      const double u = mean + std::exp(log_std) * eps;
      a2(k) = std::tanh(u);
      logpi += -0.5 * eps * eps - log_std - 0.5 * std::log(2.0 * M_PI) -
               std::log(1.0 - a2(k) * a2(k) + 1e-6);
    }
    VecX sa(6);
    sa << t.next_observation, a2;
    const double q1 = mlp_forward(s.target_critic1, sa)(0);
    const double q2 = mlp_forward(s.target_critic2, sa)(0);
    CHECK(q2 < q1);  // the skew guarantees which side the minimum is on
    const double expected =
        t.reward + cfg.gamma * (std::min(q1, q2) - alpha * logpi);
    CHECK(std::abs(targets(i) - expected) <= 1e-12);
  }
}

TEST_CASE("target networks stay a convex combination after updates") {
  Rng rng(6);
  AgentConfig cfg = small_config(Algorithm::ddpg, 8, 8);
  DdpgAgent agent(cfg, 4, 2, "layout", 13);
  for (int i = 0; i < 8; ++i)
    agent.observe_and_update(make_transition(rng, 4, 2, 0.5, false));

  const Mlp target_before = agent.net_state().target_critic;
  agent.observe_and_update(make_transition(rng, 4, 2, 0.5, false));
  const Mlp& target_after = agent.net_state().target_critic;
  const Mlp& online_after = agent.net_state().critic;
  for (std::size_t l = 0; l < target_after.layer_count(); ++l) {
    const MatX expected = (1.0 - cfg.tau) * target_before.weights[l] +
                          cfg.tau * online_after.weights[l];
    CHECK((target_after.weights[l] - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("training is deterministic in the seed") {
  Rng rng(7);
  std::vector<Transition> script;
  for (int i = 0; i < 80; ++i) script.push_back(make_transition(rng, 4, 2, 0.2, i % 17 == 0));

  for (Algorithm algo : {Algorithm::ddpg, Algorithm::sac}) {
    auto a = make_agent(small_config(algo, 16, 8), 4, 2, "layout", 44);
    auto b = make_agent(small_config(algo, 16, 8), 4, 2, "layout", 44);
    for (const auto& t : script) {
      const UpdateDiagnostics da = a->observe_and_update(t);
      const UpdateDiagnostics db = b->observe_and_update(t);
      CHECK(da.critic_loss == db.critic_loss);
      CHECK(da.actor_loss == db.actor_loss);
    }
    CHECK(a->parameter_hash() == b->parameter_hash());
  }
}

TEST_CASE("single-transition Bellman fixed point pulls Q toward zero") {
  Rng rng(8);
  AgentConfig cfg = small_config(Algorithm::ddpg, 16, 16);
  DdpgAgent agent(cfg, 3, 2, "layout", 21);
  Transition t;
  t.observation = random_vec(3, rng);
  t.action = random_vec(2, rng);
  t.reward = 0.0;
  t.next_observation = t.observation;
  t.done = true;
  t.success = true;  // terminal: the target is exactly r = 0
  for (int i = 0; i < 1600; ++i) agent.observe_and_update(t);
  CHECK(std::abs(agent.q_value(t.observation, t.action)) < 0.05);
}

TEST_CASE("checkpoint round trip reproduces greedy actions bit-exactly") {
  Rng rng(9);
  const ArmConfig arm = ArmConfig::planar_2dof();
  RewardSpec reward;
  for (Algorithm algo : {Algorithm::ddpg, Algorithm::sac}) {
    auto agent = make_agent(small_config(algo, 8, 8), 15, 2, "obs/v1", 31);
    for (int i = 0; i < 40; ++i)
      agent->observe_and_update(make_transition(rng, 15, 2, -0.4, i % 9 == 0));

    const std::string path = temp_path(std::string("rl_ckpt_") + to_string(algo) + ".json");
    save_checkpoint(path, *agent, arm, reward);
    const LoadedCheckpoint loaded = load_checkpoint(path);
    CHECK(loaded.agent->obs_layout() == "obs/v1");
    CHECK(loaded.agent->parameter_hash() == agent->parameter_hash());
    for (int i = 0; i < 100; ++i) {
      const VecX obs = random_vec(15, rng, -2.0, 2.0);
      CHECK(loaded.agent->act_greedy(obs) == agent->act_greedy(obs));
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("checkpoint guards: truncation and bad format") {
  Rng rng(10);
  const ArmConfig arm = ArmConfig::planar_2dof();
  RewardSpec reward;
  auto agent = make_agent(small_config(Algorithm::ddpg, 8, 8), 15, 2, "obs/v1", 31);
  const std::string path = temp_path("rl_ckpt_guard.json");
  save_checkpoint(path, *agent, arm, reward);

  // truncate the file: the load must fail without producing a partial agent
  std::string text;
  {
    std::ifstream in(path);
    std::getline(in, text);
  }
  {
    std::ofstream out(path, std::ios::binary);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);

  {
    std::ofstream out(path, std::ios::binary);
    out << "{\"format\":\"something-else\",\"version\":1}";
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
}

TEST_CASE("agent config validation") {
  AgentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = AgentConfig{};
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = AgentConfig{};
  cfg.buffer_capacity = 8;
  cfg.batch_size = 16;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = AgentConfig{};
  cfg.hidden_sizes = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("observation size mismatches are rejected") {
  auto agent = make_agent(small_config(Algorithm::ddpg), 6, 2, "layout", 1);
  const VecX wrong = VecX::Zero(5);
  CHECK_THROWS_AS(agent->act_greedy(wrong), std::invalid_argument);
}
