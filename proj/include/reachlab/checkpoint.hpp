#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "reachlab/agents.hpp"
#include "reachlab/arm_env.hpp"
#include "reachlab/rewards.hpp"

namespace reachlab {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Versioned JSON container: agent parameters, optimizer state and RNG state
// for exact resumption, plus the environment and reward configuration the
// agent was trained against and the observation layout it expects.
void save_checkpoint(const std::string& path, const Agent& agent, const ArmConfig& arm,
                     const RewardSpec& reward);

struct LoadedCheckpoint {
  std::unique_ptr<Agent> agent;
  ArmConfig arm;
  RewardSpec reward;
};

// Refuses unknown formats/versions and truncated files; loading never yields
// a partially initialized agent.
LoadedCheckpoint load_checkpoint(const std::string& path);

// Checkpoint with a named built-in policy ("oracle" or "zero") instead of
// learned networks; used as an evaluation fixture.
void save_scripted_checkpoint(const std::string& path, const std::string& policy,
                              const ArmConfig& arm, const RewardSpec& reward);

}  // namespace reachlab
