#pragma once

#include <cmath>
#include <vector>

#include "reachlab/types.hpp"

namespace reachlab {

enum class JointAxis { x, y, z };

template <typename Scalar>
Vec3T<Scalar> axis_vector(JointAxis axis) {
  switch (axis) {
    case JointAxis::x: return Vec3T<Scalar>::UnitX();
    case JointAxis::y: return Vec3T<Scalar>::UnitY();
    default:           return Vec3T<Scalar>::UnitZ();
  }
}

// Serial chain: joint i rotates about its local axis by q(i), then the link
// extends along the rotated local x axis by link_lengths[i]. Base frame is
// the world frame at the origin.
template <typename Scalar>
PoseT<Scalar> forward_kinematics(const VecXT<Scalar>& joint_angles,
                                 const std::vector<Scalar>& link_lengths,
                                 const std::vector<JointAxis>& joint_axes) {
  PoseT<Scalar> pose;
  QuatT<Scalar> rot = QuatT<Scalar>::Identity();
  Vec3T<Scalar> pos = Vec3T<Scalar>::Zero();
  for (Eigen::Index i = 0; i < joint_angles.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const QuatT<Scalar> joint(
        Eigen::AngleAxis<Scalar>(joint_angles(i), axis_vector<Scalar>(joint_axes[idx])));
    rot = rot * joint;
    pos += rot * (link_lengths[idx] * Vec3T<Scalar>::UnitX());
  }
  rot.normalize();
  pose.position = pos;
  pose.orientation = rot;
  return pose;
}

}  // namespace reachlab
