#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reachlab/kinematics.hpp"
#include "reachlab/rewards.hpp"
#include "reachlab/rng.hpp"
#include "reachlab/types.hpp"

namespace reachlab {

// Deterministic kinematic N-DOF serial-arm reacher. Velocity control,
// Euler-integrated joint angles, random target in an annulus (planar arms
// sample in the plane, spatial arms in a spherical shell).
struct ArmConfig {
  int joint_count = 6;
  std::vector<double> link_lengths;                    // [m], one per joint
  std::vector<JointAxis> joint_axes;
  std::vector<std::pair<double, double>> joint_limits; // [rad]
  double max_joint_speed = 1.0;                        // [rad/s]
  double dt = 0.05;                                    // [s]
  int max_steps = 50;
  double beta = 0.01;                                  // success threshold [m]
  double workspace_min_fraction = 0.2;                 // of total reach
  double workspace_max_fraction = 0.9;
  bool planar_targets = false;                         // sample targets at z = 0
  double home_angle = 0.1;                             // every joint, at reset [rad]

  double total_reach() const;
  void validate() const;

  // 6-DOF spatial arm: alternating z/y axes, total reach 1 m.
  static ArmConfig spatial_6dof();
  // 2-DOF planar arm used for desk-scale experiments.
  static ArmConfig planar_2dof();
};

struct EnvState {
  VecX joint_angles;
  VecX joint_velocities;   // velocities applied on the step that produced this state
  Pose ee_pose;
  Vec3 target = Vec3::Zero();
  int step_index = 0;
  double d_pt = 0.0;
};

struct Transition {
  VecX observation;
  VecX action;
  double reward = 0.0;
  VecX next_observation;
  bool done = false;
  bool success = false;
  RewardInputs info;
};

class ArmEnv {
 public:
  explicit ArmEnv(ArmConfig cfg);

  const ArmConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }
  void set_state(EnvState state) { state_ = std::move(state); }

  // Observation layout: [sin(q), cos(q), qvel/max_speed, P, T, T - P].
  int obs_size() const { return 3 * cfg_.joint_count + 9; }
  std::string obs_layout() const;

  EnvState reset(std::uint64_t seed);

  // Applies one velocity-control step to the stored state.
  Transition step(const VecX& action, const RewardSpec& reward_spec);

  // Pure step on an explicit state; the stateful step defers to this.
  std::pair<EnvState, Transition> step_state(const EnvState& state, const VecX& action,
                                             const RewardSpec& reward_spec) const;

  // Kinematic core of a step: integrates the action and reports the facts a
  // reward is computed from, without evaluating any reward (the env bridge
  // serves exactly these facts). inputs.task_done is the success test.
  std::pair<EnvState, RewardInputs> advance(const EnvState& state, const VecX& action) const;

  VecX observe(const EnvState& state) const;

  Pose forward(const VecX& joint_angles) const;

 private:
  Vec3 sample_target(Rng& rng) const;

  ArmConfig cfg_;
  EnvState state_;
  Rng rng_;
};

}  // namespace reachlab
