#pragma once

#include "reachlab/agents.hpp"
#include "reachlab/arm_env.hpp"

namespace reachlab {

// Fixed zero-velocity policy; useful as a do-nothing baseline and fixture.
class ZeroAgent final : public Agent {
 public:
  ZeroAgent(int obs_dim, int act_dim, std::string obs_layout)
      : obs_dim_(obs_dim), act_dim_(act_dim), obs_layout_(std::move(obs_layout)) {}

  int obs_dim() const override { return obs_dim_; }
  int act_dim() const override { return act_dim_; }
  const std::string& obs_layout() const override { return obs_layout_; }

  VecX act(const VecX&, bool) override { return VecX::Zero(act_dim_); }
  VecX act_greedy(const VecX&) const override { return VecX::Zero(act_dim_); }
  UpdateDiagnostics observe_and_update(const Transition&) override {
    ++steps_;
    return {};
  }
  std::uint64_t parameter_hash() const override { return 0; }
  std::int64_t steps_observed() const override { return steps_; }

 private:
  int obs_dim_, act_dim_;
  std::string obs_layout_;
  std::int64_t steps_ = 0;
};

// Damped least-squares resolved-rate controller: recovers joint angles from
// the observation, differentiates the forward kinematics numerically and
// commands joint velocities along the pseudo-inverse direction toward the
// target. Serves as the known-good policy for harness and eval tests.
class OracleReachAgent final : public Agent {
 public:
  explicit OracleReachAgent(ArmConfig arm);

  int obs_dim() const override { return 3 * arm_.joint_count + 9; }
  int act_dim() const override { return arm_.joint_count; }
  const std::string& obs_layout() const override { return obs_layout_; }

  VecX act(const VecX& observation, bool) override { return act_greedy(observation); }
  VecX act_greedy(const VecX& observation) const override;
  UpdateDiagnostics observe_and_update(const Transition&) override {
    ++steps_;
    return {};
  }
  std::uint64_t parameter_hash() const override { return 1; }
  std::int64_t steps_observed() const override { return steps_; }

  const ArmConfig& arm() const { return arm_; }

 private:
  ArmConfig arm_;
  std::string obs_layout_;
  std::int64_t steps_ = 0;
};

}  // namespace reachlab
