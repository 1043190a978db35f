#include "reachlab/arm_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reachlab {

double ArmConfig::total_reach() const {
  return std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0);
}

void ArmConfig::validate() const {
  const auto n = static_cast<std::size_t>(joint_count);
  if (joint_count < 2) throw std::invalid_argument("arm: joint_count must be >= 2");
  if (link_lengths.size() != n || joint_axes.size() != n || joint_limits.size() != n)
    throw std::invalid_argument("arm: per-joint lists must have joint_count entries");
  for (double l : link_lengths)
    if (!(l > 0.0)) throw std::invalid_argument("arm: link lengths must be > 0");
  for (const auto& [lo, hi] : joint_limits)
    if (!(lo < hi)) throw std::invalid_argument("arm: joint limit interval is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("arm: dt must be > 0");
  if (max_steps < 1) throw std::invalid_argument("arm: max_steps must be >= 1");
  if (!(max_joint_speed > 0.0)) throw std::invalid_argument("arm: max_joint_speed must be > 0");
  if (!(workspace_min_fraction > 0.0) || !(workspace_max_fraction >= workspace_min_fraction))
    throw std::invalid_argument("arm: workspace fractions must satisfy 0 < min <= max");
  if (!(beta > 0.0) || !(beta < workspace_min_fraction * total_reach()))
    throw std::invalid_argument("arm: beta must lie in (0, min workspace radius)");
  for (std::size_t i = 0; i < n; ++i)
    if (home_angle < joint_limits[i].first || home_angle > joint_limits[i].second)
      throw std::invalid_argument("arm: home posture violates joint limits");
}

ArmConfig ArmConfig::spatial_6dof() {
  ArmConfig cfg;
  cfg.joint_count = 6;
  cfg.link_lengths.assign(6, 1.0 / 6.0);
  cfg.joint_axes = {JointAxis::z, JointAxis::y, JointAxis::z,
                    JointAxis::y, JointAxis::z, JointAxis::y};
  cfg.joint_limits.assign(6, {-M_PI, M_PI});
  cfg.max_joint_speed = 1.0;
  cfg.beta = 0.01;
  return cfg;
}

ArmConfig ArmConfig::planar_2dof() {
  ArmConfig cfg;
  cfg.joint_count = 2;
  cfg.link_lengths = {0.5, 0.5};
  cfg.joint_axes = {JointAxis::z, JointAxis::z};
  // wide limits: the planar preset models no mechanical stops
  cfg.joint_limits.assign(2, {-2.0 * M_PI, 2.0 * M_PI});
  // fast enough that a straight-line reach fits the 50-step budget from
  // anywhere in the workspace; the success ball is sized so exploration
  // noise can find it at desk scale
  cfg.max_joint_speed = 3.0;
  cfg.beta = 0.05;
  cfg.planar_targets = true;
  return cfg;
}

ArmEnv::ArmEnv(ArmConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  state_.joint_angles = VecX::Constant(cfg_.joint_count, cfg_.home_angle);
  state_.joint_velocities = VecX::Zero(cfg_.joint_count);
  state_.ee_pose = forward(state_.joint_angles);
}

std::string ArmEnv::obs_layout() const {
  return "sincos_qvel_p_t_tp/v1/n=" + std::to_string(cfg_.joint_count);
}

Pose ArmEnv::forward(const VecX& joint_angles) const {
  return forward_kinematics<double>(joint_angles, cfg_.link_lengths, cfg_.joint_axes);
}

Vec3 ArmEnv::sample_target(Rng& rng) const {
  const double reach = cfg_.total_reach();
  const double r_min = cfg_.workspace_min_fraction * reach;
  const double r_max = cfg_.workspace_max_fraction * reach;
  // Reach bounds of the chain itself (with free joint travel the closest
  // approach to the base is limited by the longest link).
  const double longest = *std::max_element(cfg_.link_lengths.begin(), cfg_.link_lengths.end());
  const double reachable_min = std::max(0.0, 2.0 * longest - reach);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    double radius;
    if (r_min == r_max) {
      radius = r_min;
    } else if (cfg_.planar_targets) {
      // area-uniform over the annulus
      radius = std::sqrt(rng.uniform(r_min * r_min, r_max * r_max));
    } else {
      // volume-uniform over the shell
      radius = std::cbrt(rng.uniform(r_min * r_min * r_min, r_max * r_max * r_max));
    }
    Vec3 dir;
    if (cfg_.planar_targets) {
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      dir = Vec3(std::cos(theta), std::sin(theta), 0.0);
    } else {
      const double z = rng.uniform(-1.0, 1.0);
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      dir = Vec3(s * std::cos(theta), s * std::sin(theta), z);
    }
    const Vec3 target = radius * dir;
    const double norm = target.norm();
    if (norm >= reachable_min && norm <= reach) return target;
  }
  throw std::runtime_error(
      "arm: target sampling failed after 10000 rejections; workspace unreachable");
}

EnvState ArmEnv::reset(std::uint64_t seed) {
  rng_.reseed(seed);
  EnvState s;
  s.joint_angles = VecX::Constant(cfg_.joint_count, cfg_.home_angle);
  s.joint_velocities = VecX::Zero(cfg_.joint_count);
  s.ee_pose = forward(s.joint_angles);
  s.target = sample_target(rng_);
  s.step_index = 0;
  s.d_pt = (s.target - s.ee_pose.position).norm();
  state_ = s;
  return s;
}

std::pair<EnvState, RewardInputs> ArmEnv::advance(const EnvState& state,
                                                  const VecX& action) const {
  const int n = cfg_.joint_count;
  if (action.size() != n) throw std::invalid_argument("step: action length mismatch");
  if (!action.allFinite()) throw std::invalid_argument("step: non-finite action");
  if (state.step_index >= cfg_.max_steps)
    throw std::invalid_argument("step: episode already finished");

  EnvState next;
  next.joint_velocities =
      action.cwiseMax(-1.0).cwiseMin(1.0) * cfg_.max_joint_speed;
  next.joint_angles = state.joint_angles + next.joint_velocities * cfg_.dt;
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = cfg_.joint_limits[static_cast<std::size_t>(i)];
    if (next.joint_angles(i) <= lo) {
      next.joint_angles(i) = lo;
      next.joint_velocities(i) = 0.0;
    } else if (next.joint_angles(i) >= hi) {
      next.joint_angles(i) = hi;
      next.joint_velocities(i) = 0.0;
    }
  }
  next.ee_pose = forward(next.joint_angles);
  next.target = state.target;
  next.step_index = state.step_index + 1;
  next.d_pt = (next.target - next.ee_pose.position).norm();

  RewardInputs inputs;
  inputs.d_pt = next.d_pt;
  inputs.ee_position = next.ee_pose.position;
  inputs.target = next.target;
  inputs.ee_quaternion = next.ee_pose.orientation;
  inputs.displacement = next.ee_pose.position - state.ee_pose.position;
  inputs.joint_velocities = next.joint_velocities;
  inputs.dt = cfg_.dt;
  inputs.joint_count = n;
  inputs.task_done = next.d_pt < cfg_.beta;
  return {std::move(next), std::move(inputs)};
}

std::pair<EnvState, Transition> ArmEnv::step_state(const EnvState& state, const VecX& action,
                                                   const RewardSpec& reward_spec) const {
  auto [next, inputs] = advance(state, action);
  const bool success = inputs.task_done;
  const bool done = success || next.step_index >= cfg_.max_steps;

  Transition tr;
  tr.observation = observe(state);
  tr.action = action.cwiseMax(-1.0).cwiseMin(1.0);
  tr.reward = evaluate_reward(reward_spec, inputs) +
              (success ? reward_spec.config.success_bonus : 0.0);
  tr.next_observation = observe(next);
  tr.done = done;
  tr.success = success;
  tr.info = inputs;
  return {next, tr};
}

Transition ArmEnv::step(const VecX& action, const RewardSpec& reward_spec) {
  auto [next, tr] = step_state(state_, action, reward_spec);
  state_ = std::move(next);
  return tr;
}

VecX ArmEnv::observe(const EnvState& state) const {
  const int n = cfg_.joint_count;
  VecX obs(obs_size());
  obs.segment(0, n) = state.joint_angles.array().sin();
  obs.segment(n, n) = state.joint_angles.array().cos();
  obs.segment(2 * n, n) = state.joint_velocities / cfg_.max_joint_speed;
  obs.segment(3 * n, 3) = state.ee_pose.position;
  obs.segment(3 * n + 3, 3) = state.target;
  obs.segment(3 * n + 6, 3) = state.target - state.ee_pose.position;
  return obs;
}

}  // namespace reachlab
