#include <doctest.h>

#include <array>
#include <cmath>

#include "reachlab/kinematics.hpp"
#include "reachlab/rng.hpp"

using namespace reachlab;

namespace {

// Independent oracle: plain 4x4 homogeneous transform chain with hand-written
// rotation matrices, no Eigen geometry involved.
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 multiply(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat4 rotation4(JointAxis axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat4 m = identity4();
  switch (axis) {
    case JointAxis::x:
      m[1][1] = c; m[1][2] = -s;
      m[2][1] = s; m[2][2] = c;
      break;
    case JointAxis::y:
      m[0][0] = c; m[0][2] = s;
      m[2][0] = -s; m[2][2] = c;
      break;
    case JointAxis::z:
      m[0][0] = c; m[0][1] = -s;
      m[1][0] = s; m[1][1] = c;
      break;
  }
  return m;
}

Mat4 translation4(double x) {
  Mat4 m = identity4();
  m[0][3] = x;
  return m;
}

Vec3 oracle_position(const VecX& q, const std::vector<double>& links,
                     const std::vector<JointAxis>& axes) {
  Mat4 frame = identity4();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    frame = multiply(frame, rotation4(axes[static_cast<std::size_t>(i)], q(i)));
    frame = multiply(frame, translation4(links[static_cast<std::size_t>(i)]));
  }
  return Vec3(frame[0][3], frame[1][3], frame[2][3]);
}

MatX oracle_rotation(const VecX& q, const std::vector<JointAxis>& axes) {
  Mat4 frame = identity4();
  for (Eigen::Index i = 0; i < q.size(); ++i)
    frame = multiply(frame, rotation4(axes[static_cast<std::size_t>(i)], q(i)));
  MatX r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = frame[i][j];
  return r;
}

}  // namespace

TEST_CASE("straight planar arm") {
  VecX q = VecX::Zero(2);
  const Pose pose = forward_kinematics<double>(q, {1.0, 1.0}, {JointAxis::z, JointAxis::z});
  CHECK((pose.position - Vec3(2, 0, 0)).norm() < 1e-15);
}

TEST_CASE("base joint rotation moves the whole chain") {
  VecX q(2);
  q << M_PI / 2.0, 0.0;
  const Pose pose = forward_kinematics<double>(q, {1.0, 1.0}, {JointAxis::z, JointAxis::z});
  CHECK((pose.position - Vec3(0, 2, 0)).norm() < 1e-12);
}

TEST_CASE("matches the homogeneous transform-chain oracle") {
  Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> links;
    std::vector<JointAxis> axes;
    VecX q(n);
    for (int i = 0; i < n; ++i) {
      links.push_back(rng.uniform(0.1, 1.2));
      const std::size_t pick = rng.uniform_index(3);
      axes.push_back(pick == 0 ? JointAxis::x : pick == 1 ? JointAxis::y : JointAxis::z);
      q(i) = rng.uniform(-M_PI, M_PI);
    }
    const Pose pose = forward_kinematics<double>(q, links, axes);
    CHECK((pose.position - oracle_position(q, links, axes)).norm() < 1e-10);
    CHECK((pose.orientation.toRotationMatrix() - oracle_rotation(q, axes)).norm() < 1e-9);
    CHECK(std::abs(pose.orientation.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("position stays within total reach") {
  Rng rng(11);
  const std::vector<double> links{0.3, 0.4, 0.3};
  const std::vector<JointAxis> axes{JointAxis::z, JointAxis::y, JointAxis::z};
  for (int trial = 0; trial < 200; ++trial) {
    VecX q(3);
    for (int i = 0; i < 3; ++i) q(i) = rng.uniform(-M_PI, M_PI);
    CHECK(forward_kinematics<double>(q, links, axes).position.norm() <= 1.0 + 1e-12);
  }
}
