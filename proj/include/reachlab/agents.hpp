#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachlab/arm_env.hpp"
#include "reachlab/neuro.hpp"
#include "reachlab/rng.hpp"
#include "reachlab/types.hpp"

namespace reachlab {

enum class Algorithm { ddpg, sac };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct AgentConfig {
  Algorithm algorithm = Algorithm::ddpg;
  double gamma = 0.98;
  double tau = 0.005;
  int batch_size = 128;
  int buffer_capacity = 200000;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double exploration_noise = 0.1;   // DDPG Gaussian stddev on the [-1,1] scale
  bool auto_temperature = true;     // SAC: tune alpha toward target entropy -N
  double temperature = 0.2;         // SAC: fixed alpha, or initial value in auto mode
  double temperature_lr = 1e-3;
  int warmup_steps = 1000;          // uniform-random actions, no updates
  std::vector<int> hidden_sizes = {64, 64};

  void validate() const;
};

struct StoredTransition {
  VecX observation;
  VecX action;
  double reward = 0.0;
  VecX next_observation;
  // Bootstrap cut. True only for success termination; an episode that merely
  // ran out of steps is truncated, not terminal, and still bootstraps.
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(StoredTransition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const StoredTransition& at(std::size_t i) const { return storage_[i]; }

  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<StoredTransition> storage_;
};

struct UpdateDiagnostics {
  bool updated = false;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double temperature = 0.0;  // SAC only
};

// Raised when a training update produces a non-finite loss or gradient; the
// harness converts it into a failed run with partial records preserved.
class AgentDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual const std::string& obs_layout() const = 0;

  // Exploration path; draws from the agent RNG. During warmup the action is
  // uniform in [-1,1]^N.
  virtual VecX act(const VecX& observation, bool explore) = 0;
  // Deterministic greedy action; never touches agent state.
  virtual VecX act_greedy(const VecX& observation) const = 0;

  virtual UpdateDiagnostics observe_and_update(const Transition& transition) = 0;

  virtual std::uint64_t parameter_hash() const = 0;
  virtual std::int64_t steps_observed() const = 0;
};

// --- DDPG -------------------------------------------------------------------

struct DdpgState {
  Mlp actor, critic, target_actor, target_critic;
  AdamState actor_opt, critic_opt;
};

class DdpgAgent final : public Agent {
 public:
  DdpgAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
            std::uint64_t seed);
  // Restores a saved agent (checkpoint load, instrumented tests).
  DdpgAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
            DdpgState state, Rng rng, std::int64_t steps_observed);

  Algorithm algorithm() const { return Algorithm::ddpg; }
  const AgentConfig& config() const { return cfg_; }
  int obs_dim() const override { return obs_dim_; }
  int act_dim() const override { return act_dim_; }
  const std::string& obs_layout() const override { return obs_layout_; }

  VecX act(const VecX& observation, bool explore) override;
  VecX act_greedy(const VecX& observation) const override;
  UpdateDiagnostics observe_and_update(const Transition& transition) override;

  std::uint64_t parameter_hash() const override;
  std::int64_t steps_observed() const override { return steps_observed_; }

  const DdpgState& net_state() const { return state_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Rng& rng() const { return rng_; }

  double q_value(const VecX& observation, const VecX& action) const;
  // Bellman regression targets r + gamma * (1 - terminal) * Q_target(s', mu_target(s')).
  VecX critic_targets(const std::vector<StoredTransition>& batch) const;

 private:
  UpdateDiagnostics update();

  AgentConfig cfg_;
  int obs_dim_, act_dim_;
  std::string obs_layout_;
  DdpgState state_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::int64_t steps_observed_ = 0;
};

// --- SAC --------------------------------------------------------------------

struct SacState {
  Mlp actor;  // heads: [mean; log_std], log_std clamped to [-20, 2]
  Mlp critic1, critic2, target_critic1, target_critic2;
  AdamState actor_opt, critic1_opt, critic2_opt;
  double log_alpha = 0.0;
  // scalar Adam accumulators for log_alpha
  double alpha_m = 0.0, alpha_v = 0.0;
  long alpha_step = 0;
};

class SacAgent final : public Agent {
 public:
  SacAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
           std::uint64_t seed);
  SacAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
           SacState state, Rng rng, std::int64_t steps_observed);

  Algorithm algorithm() const { return Algorithm::sac; }
  const AgentConfig& config() const { return cfg_; }
  int obs_dim() const override { return obs_dim_; }
  int act_dim() const override { return act_dim_; }
  const std::string& obs_layout() const override { return obs_layout_; }

  VecX act(const VecX& observation, bool explore) override;
  VecX act_greedy(const VecX& observation) const override;
  UpdateDiagnostics observe_and_update(const Transition& transition) override;

  std::uint64_t parameter_hash() const override;
  std::int64_t steps_observed() const override { return steps_observed_; }

  const SacState& net_state() const { return state_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Rng& rng() const { return rng_; }
  double alpha() const;

  double q_value(const VecX& observation, const VecX& action) const;
  // Targets r + gamma * (1 - terminal) * (min(Q1t, Q2t)(s', a') - alpha * logpi(a'|s'))
  // with a' driven by the supplied standard-normal noise (one column per sample).
  VecX critic_targets(const std::vector<StoredTransition>& batch,
                      const MatX& next_action_noise) const;

 private:
  UpdateDiagnostics update();

  AgentConfig cfg_;
  int obs_dim_, act_dim_;
  std::string obs_layout_;
  SacState state_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::int64_t steps_observed_ = 0;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, int obs_dim, int act_dim,
                                  std::string obs_layout, std::uint64_t seed);

}  // namespace reachlab
