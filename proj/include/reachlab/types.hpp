#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace reachlab {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using VecXT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatXT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using QuatT = Eigen::Quaternion<Scalar>;

using Vec3 = Vec3T<double>;
using VecX = VecXT<double>;
using MatX = MatXT<double>;
using Quat = QuatT<double>;

// End-effector pose. The quaternion follows the scalar-last (x, y, z, w)
// convention at every serialization boundary; Eigen stores coefficients in
// that order internally, so coeffs() can be written out directly.
template <typename Scalar>
struct PoseT {
  Vec3T<Scalar> position = Vec3T<Scalar>::Zero();
  QuatT<Scalar> orientation = QuatT<Scalar>::Identity();
};

using Pose = PoseT<double>;

}  // namespace reachlab
