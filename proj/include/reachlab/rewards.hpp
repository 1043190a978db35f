#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "reachlab/types.hpp"

namespace reachlab {

enum class RewardKind { basic, position, posture, stride, har, sar };
enum class DirectionMode { quaternion_axis, displacement };

inline const char* to_string(RewardKind k) {
  switch (k) {
    case RewardKind::basic:    return "basic";
    case RewardKind::position: return "position";
    case RewardKind::posture:  return "posture";
    case RewardKind::stride:   return "stride";
    case RewardKind::har:      return "har";
    case RewardKind::sar:      return "sar";
  }
  return "?";
}

inline const char* to_string(DirectionMode m) {
  return m == DirectionMode::quaternion_axis ? "quaternion_axis" : "displacement";
}

inline RewardKind reward_kind_from_string(const std::string& s) {
  for (RewardKind k : {RewardKind::basic, RewardKind::position, RewardKind::posture,
                       RewardKind::stride, RewardKind::har, RewardKind::sar}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown reward kind: \"" + s + "\"");
}

inline DirectionMode direction_mode_from_string(const std::string& s) {
  if (s == "quaternion_axis") return DirectionMode::quaternion_axis;
  if (s == "displacement") return DirectionMode::displacement;
  throw std::invalid_argument("unknown direction_mode: \"" + s + "\"");
}

template <typename Scalar>
struct RewardConfigT {
  Scalar beta = Scalar(0.01);          // success threshold on d_pt [m]
  Scalar har_boundary = Scalar(0.5);   // fast-approach / slow-adjustable split [m]
  Scalar sigma1 = Scalar(1);
  Scalar sigma2 = Scalar(1);
  DirectionMode direction_mode = DirectionMode::quaternion_axis;
  Scalar success_bonus = Scalar(20);   // added by the environment, never here

  void validate() const {
    if (!(beta > Scalar(0))) throw std::invalid_argument("reward: beta must be > 0");
    if (!(har_boundary > beta))
      throw std::invalid_argument("reward: har_boundary must exceed beta");
    if (!(sigma1 > Scalar(0)) || !(sigma2 > Scalar(0)))
      throw std::invalid_argument("reward: sigma1/sigma2 must be > 0");
  }
};

using RewardConfig = RewardConfigT<double>;

// Snapshot of the kinematic facts a reward is computed from, taken after the
// step has been integrated. d_pt, ee_position and ee_quaternion all describe
// the post-step state; displacement is the end-effector motion of the step.
template <typename Scalar>
struct RewardInputsT {
  Scalar d_pt = Scalar(0);
  Vec3T<Scalar> ee_position = Vec3T<Scalar>::Zero();
  Vec3T<Scalar> target = Vec3T<Scalar>::Zero();
  QuatT<Scalar> ee_quaternion = QuatT<Scalar>::Identity();  // scalar-last on the wire
  Vec3T<Scalar> displacement = Vec3T<Scalar>::Zero();
  VecXT<Scalar> joint_velocities;
  Scalar dt = Scalar(0.05);
  int joint_count = 0;
  bool task_done = false;
};

using RewardInputs = RewardInputsT<double>;

struct RewardSpec {
  RewardKind kind = RewardKind::sar;
  RewardConfig config;
};

// --- primitive terms -------------------------------------------------------

// 1 iff d_pt < beta; the boundary d_pt == beta counts as not reached.
template <typename Scalar>
int task_status(Scalar d_pt, Scalar beta) {
  return d_pt < beta ? 1 : 0;
}

template <typename Scalar>
Scalar position_reward(Scalar d_pt, Scalar beta) {
  return Scalar(task_status(d_pt, beta)) - d_pt;
}

template <typename Scalar>
Vec3T<Scalar> expected_direction(const Vec3T<Scalar>& ee_position,
                                 const Vec3T<Scalar>& target) {
  if (ee_position == target)
    throw std::invalid_argument("expected_direction: end effector coincides with target");
  return target - ee_position;
}

// Unit rotation axis of the pose quaternion, or the raw step displacement.
// Returns nullopt when the direction is undefined (identity-like quaternion,
// or zero displacement); callers treat that as a zero direction penalty.
template <typename Scalar>
std::optional<Vec3T<Scalar>> actual_direction(const RewardInputsT<Scalar>& in,
                                              DirectionMode mode) {
  if (mode == DirectionMode::displacement) {
    if (in.displacement.squaredNorm() == Scalar(0)) return std::nullopt;
    return in.displacement;
  }
  const Scalar w = in.ee_quaternion.w();
  if (std::abs(w) >= Scalar(1) - Scalar(1e-9)) return std::nullopt;
  const Scalar temp = std::sin(std::acos(w));
  if (temp < Scalar(1e-9)) return std::nullopt;
  return Vec3T<Scalar>(in.ee_quaternion.x() / temp, in.ee_quaternion.y() / temp,
                       in.ee_quaternion.z() / temp);
}

template <typename Scalar>
Scalar angle_between(const Vec3T<Scalar>& v1, const Vec3T<Scalar>& v2) {
  const Scalar n1 = v1.squaredNorm();
  const Scalar n2 = v2.squaredNorm();
  if (n1 == Scalar(0) || n2 == Scalar(0))
    throw std::invalid_argument("angle_between: zero vector");
  // clamp absorbs roundoff on near-parallel vectors
  const Scalar ratio =
      std::clamp(v1.dot(v2) / std::sqrt(n1 * n2), Scalar(-1), Scalar(1));
  return std::abs(std::acos(ratio));
}

// [phi]_* / 2pi: angles past pi/2 fold back, so retreat and approach score alike.
template <typename Scalar>
Scalar direction_reward(Scalar phi) {
  const Scalar pi = Scalar(M_PI);
  const Scalar folded = phi < pi / Scalar(2) ? phi : pi - phi;
  return folded / (Scalar(2) * pi);
}

// --- composite rewards ------------------------------------------------------

namespace detail {
// Direction penalty with the undefined-axis convention folded in.
template <typename Scalar>
Scalar direction_term(const RewardInputsT<Scalar>& in, const RewardConfigT<Scalar>& cfg) {
  const auto actual = actual_direction(in, cfg.direction_mode);
  if (!actual) return Scalar(0);
  const Vec3T<Scalar> expected = expected_direction(in.ee_position, in.target);
  return direction_reward(angle_between(expected, *actual));
}
}  // namespace detail

template <typename Scalar>
Scalar posture_reward(const RewardInputsT<Scalar>& in, const RewardConfigT<Scalar>& cfg) {
  return position_reward(in.d_pt, cfg.beta) - detail::direction_term(in, cfg);
}

template <typename Scalar>
Scalar move_reward(const VecXT<Scalar>& joint_velocities, Scalar dt, int joint_count) {
  if (joint_count < 1) throw std::invalid_argument("move_reward: joint_count must be >= 1");
  if (!(dt > Scalar(0))) throw std::invalid_argument("move_reward: dt must be > 0");
  return dt * joint_velocities.squaredNorm() / Scalar(joint_count);
}

template <typename Scalar>
Scalar stride_reward(const RewardInputsT<Scalar>& in, const RewardConfigT<Scalar>& cfg) {
  return position_reward(in.d_pt, cfg.beta) -
         move_reward(in.joint_velocities, in.dt, in.joint_count);
}

// Hard stage incentive: posture in the fast approach area, stride in the slow
// adjustable area; d_pt == har_boundary resolves to the stride side.
template <typename Scalar>
Scalar har_reward(const RewardInputsT<Scalar>& in, const RewardConfigT<Scalar>& cfg) {
  return in.d_pt > cfg.har_boundary ? posture_reward(in, cfg) : stride_reward(in, cfg);
}

// alpha = (1 - [d]^s1, [d]^s2) with [.] the clamp of d_pt to [0, 1].
template <typename Scalar>
std::pair<Scalar, Scalar> sar_weights(Scalar d_pt, const RewardConfigT<Scalar>& cfg) {
  const Scalar c = std::clamp(d_pt, Scalar(0), Scalar(1));
  return {Scalar(1) - std::pow(c, cfg.sigma1), std::pow(c, cfg.sigma2)};
}

template <typename Scalar>
Scalar sar_reward(const RewardInputsT<Scalar>& in, const RewardConfigT<Scalar>& cfg) {
  const auto [alpha_stride, alpha_posture] = sar_weights(in.d_pt, cfg);
  if (alpha_posture == Scalar(0)) return stride_reward(in, cfg);
  if (alpha_stride == Scalar(0)) return posture_reward(in, cfg);
  return alpha_stride * stride_reward(in, cfg) + alpha_posture * posture_reward(in, cfg);
}

template <typename Scalar>
Scalar sparse_reward(bool task_done) {
  return task_done ? Scalar(1) : Scalar(0);
}

// Single dispatch point used by the environment step and the bridge. The
// success bonus is added by the environment, never here.
template <typename Scalar>
Scalar evaluate_reward(RewardKind kind, const RewardInputsT<Scalar>& in,
                       const RewardConfigT<Scalar>& cfg) {
  switch (kind) {
    case RewardKind::basic:    return sparse_reward<Scalar>(in.task_done);
    case RewardKind::position: return position_reward(in.d_pt, cfg.beta);
    case RewardKind::posture:  return posture_reward(in, cfg);
    case RewardKind::stride:   return stride_reward(in, cfg);
    case RewardKind::har:      return har_reward(in, cfg);
    case RewardKind::sar:      return sar_reward(in, cfg);
  }
  throw std::invalid_argument("evaluate_reward: bad kind");
}

inline double evaluate_reward(const RewardSpec& spec, const RewardInputs& in) {
  return evaluate_reward(spec.kind, in, spec.config);
}

}  // namespace reachlab
