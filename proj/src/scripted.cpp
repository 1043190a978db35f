#include "reachlab/scripted.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "reachlab/kinematics.hpp"

namespace reachlab {

OracleReachAgent::OracleReachAgent(ArmConfig arm) : arm_(std::move(arm)) {
  arm_.validate();
  obs_layout_ = "sincos_qvel_p_t_tp/v1/n=" + std::to_string(arm_.joint_count);
}

namespace {

MatX position_jacobian(const VecX& q, const ArmConfig& arm) {
  const double h = 1e-6;
  MatX jac(3, q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    VecX qp = q, qm = q;
    qp(j) += h;
    qm(j) -= h;
    const Vec3 pp = forward_kinematics<double>(qp, arm.link_lengths, arm.joint_axes).position;
    const Vec3 pm = forward_kinematics<double>(qm, arm.link_lengths, arm.joint_axes).position;
    jac.col(j) = (pp - pm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

VecX OracleReachAgent::act_greedy(const VecX& observation) const {
  const int n = arm_.joint_count;
  if (observation.size() != obs_dim())
    throw std::invalid_argument("oracle: observation size mismatch");

  VecX q(n);
  for (int i = 0; i < n; ++i) q(i) = std::atan2(observation(i), observation(n + i));
  const Vec3 position = observation.segment(3 * n, 3);
  const Vec3 target = position + Vec3(observation.segment(3 * n + 6, 3));

  // Damped-least-squares IK from the current configuration: the converged
  // joint goal is the nearby solution, so commanding straight toward it in
  // joint space cannot stall in low-manipulability regions the way pure
  // task-space descent does.
  VecX q_goal = q;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec3 error =
        target - forward_kinematics<double>(q_goal, arm_.link_lengths, arm_.joint_axes).position;
    if (error.norm() < 1e-10) break;
    const MatX jac = position_jacobian(q_goal, arm_);
    const double lambda = 1e-6;
    const Eigen::Matrix3d gram =
        jac * jac.transpose() + lambda * Eigen::Matrix3d::Identity();
    VecX dq = jac.transpose() * gram.ldlt().solve(error);
    const double step = dq.cwiseAbs().maxCoeff();
    if (step > 0.5) dq *= 0.5 / step;  // keep the iteration stable
    q_goal += dq;
    for (int i = 0; i < n; ++i) {
      const auto& [lo, hi] = arm_.joint_limits[static_cast<std::size_t>(i)];
      q_goal(i) = std::clamp(q_goal(i), lo, hi);
    }
  }

  // proportional joint-space command, uniformly scaled into the action box
  VecX action = (q_goal - q) / (arm_.max_joint_speed * arm_.dt);
  const double peak = action.cwiseAbs().maxCoeff();
  if (peak > 1.0) action /= peak;
  return action;
}

}  // namespace reachlab
