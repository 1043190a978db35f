// Acceptance suite: one criterion per invocation (argv[1] = 1..10), or all
// of them with no arguments. Each criterion prints a single PASS/FAIL line;
// criterion 8 is diagnostic and prints RECORDED instead.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reachlab/agents.hpp"
#include "reachlab/arm_env.hpp"
#include "reachlab/bridge.hpp"
#include "reachlab/harness.hpp"
#include "reachlab/kinematics.hpp"
#include "reachlab/rewards.hpp"
#include "reachlab/rng.hpp"

using namespace reachlab;

namespace {

namespace fs = std::filesystem;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

RewardInputs axis_inputs(double d_pt, const Vec3& axis, double angle, int joints = 6) {
  RewardInputs in;
  in.d_pt = d_pt;
  in.ee_position = Vec3::Zero();
  in.target = Vec3(d_pt, 0.0, 0.0);
  const Vec3 unit = axis.normalized();
  in.ee_quaternion =
      Quat(std::cos(angle / 2.0), unit.x() * std::sin(angle / 2.0),
           unit.y() * std::sin(angle / 2.0), unit.z() * std::sin(angle / 2.0));
  in.joint_velocities = VecX::Zero(joints);
  in.dt = 0.05;
  in.joint_count = joints;
  return in;
}

// ---------------------------------------------------------------- criterion 1

int criterion_1() {
  const double t0 = now_seconds();
  Check c;
  const RewardConfig cfg;  // beta 0.01, boundary 0.5, sigma 1, dt constants below
  const double tol = 1e-12;
  auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };

  c.expect(task_status(0.5, 0.01) == 0, "task_status(0.5)");
  c.expect(task_status(0.005, 0.01) == 1, "task_status(0.005)");
  c.expect(task_status(0.01, 0.01) == 0, "task_status boundary");
  c.expect(near(position_reward(0.5, 0.01), -0.5), "position(0.5)");
  c.expect(near(position_reward(0.005, 0.01), 0.995), "position(0.005)");
  c.expect(near(position_reward(0.0, 0.01), 1.0), "position(0)");

  c.expect(expected_direction<double>(Vec3(0, 0, 0), Vec3(1, 2, 3)) == Vec3(1, 2, 3),
           "expected_direction origin");
  c.expect(expected_direction<double>(Vec3(1, 1, 1), Vec3(1, 1, 2)) == Vec3(0, 0, 1),
           "expected_direction axis");

  {
    RewardInputs in = axis_inputs(1.0, Vec3(0, 0, 1), M_PI);
    const auto axis = actual_direction(in, DirectionMode::quaternion_axis);
    c.expect(axis && (*axis - Vec3(0, 0, 1)).norm() <= tol, "axis 180deg z");
    in.ee_quaternion = Quat(0.70710678, 0.70710678, 0.0, 0.0);
    const auto axis_x = actual_direction(in, DirectionMode::quaternion_axis);
    c.expect(axis_x && (*axis_x - Vec3(1, 0, 0)).norm() <= 1e-8, "axis 90deg x");
    in.ee_quaternion = Quat::Identity();
    c.expect(!actual_direction(in, DirectionMode::quaternion_axis), "identity axis");
  }

  c.expect(near(angle_between<double>(Vec3(1, 0, 0), Vec3(2, 0, 0)), 0.0), "angle 0");
  c.expect(near(angle_between<double>(Vec3(1, 0, 0), Vec3(0, 1, 0)), M_PI / 2), "angle pi/2");
  c.expect(near(angle_between<double>(Vec3(1, 0, 0), Vec3(-1, 0, 0)), M_PI), "angle pi");

  c.expect(near(direction_reward(0.0), 0.0), "dir(0)");
  c.expect(near(direction_reward(M_PI / 2), 0.25), "dir(pi/2)");
  c.expect(near(direction_reward(3 * M_PI / 4), 0.125), "dir(3pi/4)");

  c.expect(near(posture_reward(axis_inputs(0.5, Vec3(0, 0, 1), M_PI / 2), cfg), -0.75),
           "posture(0.5, pi/2)");
  c.expect(near(posture_reward(axis_inputs(0.005, Vec3(1, 0, 0), M_PI / 2), cfg), 0.995),
           "posture aligned");
  {
    RewardInputs in = axis_inputs(1.0, Vec3(0, 0, 1), M_PI / 2);
    in.ee_quaternion = Quat::Identity();
    c.expect(near(posture_reward(in, cfg), -1.0), "posture undefined axis");
  }

  c.expect(near(move_reward<double>(VecX::Zero(6), 0.05, 6), 0.0), "move zeros");
  c.expect(near(move_reward<double>(VecX::Ones(6), 0.05, 6), 0.05), "move ones N=6 dt=0.05");
  {
    VecX v(2);
    v << 1.0, 2.0;
    c.expect(near(move_reward<double>(v, 0.05, 2), 0.125), "move (1,2)");
  }

  {
    RewardInputs in = axis_inputs(0.5, Vec3(1, 0, 0), M_PI / 2);
    c.expect(near(stride_reward(in, cfg), -0.5), "stride rest");
    in.joint_velocities = VecX::Ones(6);
    c.expect(near(stride_reward(in, cfg), -0.55), "stride ones");
    c.expect(near(stride_reward(axis_inputs(0.005, Vec3(1, 0, 0), M_PI / 2), cfg), 0.995),
             "stride near goal");
  }

  {
    RewardInputs far = axis_inputs(0.6, Vec3(1, 0, 0), M_PI / 2);
    far.joint_velocities = VecX::Ones(6);
    c.expect(near(har_reward(far, cfg), -0.6), "har fast approach");
    c.expect(near(har_reward(axis_inputs(0.4, Vec3(0, 0, 1), M_PI / 2), cfg), -0.4),
             "har slow adjustable");
    RewardInputs at = axis_inputs(0.5, Vec3(0, 0, 1), M_PI / 2);
    at.joint_velocities = VecX::Ones(6);
    c.expect(near(har_reward(at, cfg), stride_reward(at, cfg)), "har boundary side");
  }

  {
    auto [a1, a2] = sar_weights(0.0, cfg);
    c.expect(near(a1, 1.0) && near(a2, 0.0), "sar weights d=0");
    std::tie(a1, a2) = sar_weights(1.7, cfg);
    c.expect(near(a1, 0.0) && near(a2, 1.0), "sar weights d>=1");
    std::tie(a1, a2) = sar_weights(0.5, cfg);
    c.expect(near(a1, 0.5) && near(a2, 0.5), "sar weights d=0.5");
  }

  {
    RewardInputs far = axis_inputs(1.5, Vec3(0, 0, 1), M_PI / 2);
    c.expect(sar_reward(far, cfg) == posture_reward(far, cfg), "sar == posture far");
    c.expect(near(sar_reward(axis_inputs(0.5, Vec3(1, 0, 0), M_PI / 2), cfg), -0.5),
             "sar midpoint");
    RewardInputs origin = axis_inputs(0.0, Vec3(0, 0, 1), M_PI / 2);
    origin.target = Vec3(1e-300, 0, 0);
    origin.joint_velocities = VecX::Ones(6);
    c.expect(near(sar_reward(origin, cfg), stride_reward(origin, cfg)), "sar -> stride");
  }

  c.expect(sparse_reward<double>(true) == 1.0 && sparse_reward<double>(false) == 0.0,
           "sparse");
  {
    RewardInputs done_in = axis_inputs(0.005, Vec3(1, 0, 0), M_PI / 2);
    done_in.task_done = true;
    c.expect(evaluate_reward(RewardKind::basic, done_in, cfg) == 1.0, "dispatch basic");
    c.expect(near(evaluate_reward(RewardKind::sar, axis_inputs(0.5, Vec3(1, 0, 0), M_PI / 2), cfg),
                  -0.5),
             "dispatch sar");
    RewardInputs far = axis_inputs(0.6, Vec3(1, 0, 0), M_PI / 2);
    far.joint_velocities = VecX::Ones(6);
    c.expect(near(evaluate_reward(RewardKind::har, far, cfg), -0.6), "dispatch har");
  }

  const double elapsed = now_seconds() - t0;
  c.expect(elapsed < 1.0, "runtime under 1 s");
  std::printf("[%s] criterion 1: reward golden values (abs err <= 1e-12, %.3f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criterion 2

int criterion_2() {
  const double t0 = now_seconds();
  Check c;
  const RewardConfig cfg;
  Rng rng(777);

  // SAR continuity: 10,000 random inputs, fixed phi and velocities per input
  const double eps = 1e-6;
  for (int i = 0; i < 10000; ++i) {
    double d = rng.uniform(0.0, 2.0);
    if (std::abs(d - cfg.beta) < 1e-5) d += 2e-5;  // J_reach jumps at beta by design
    RewardInputs in = axis_inputs(d, Vec3(0, 0, 1), rng.uniform(0.1, 3.0));
    for (Eigen::Index k = 0; k < in.joint_velocities.size(); ++k)
      in.joint_velocities(k) = rng.uniform(-2.0, 2.0);
    RewardInputs bumped = in;
    bumped.d_pt = d + eps;
    bumped.target = Vec3(d + eps, 0.0, 0.0);
    const double delta = std::abs(sar_reward(bumped, cfg) - sar_reward(in, cfg));
    c.expect(delta <= 10.0 * eps, "sar continuity at d=" + std::to_string(d));
    if (!c.ok) break;
  }

  // HAR jump at the boundary on inputs where posture != stride
  {
    const double step = 1e-9;
    const double below = har_reward(axis_inputs(0.5 - step, Vec3(0, 0, 1), M_PI / 2), cfg);
    const double above = har_reward(axis_inputs(0.5 + step, Vec3(0, 0, 1), M_PI / 2), cfg);
    c.expect(std::abs(above - below) > 0.2, "har jump magnitude");
    c.expect(above < below, "har jump sign (posture penalized side)");
  }

  // SAR == posture exactly for d >= 1
  for (int i = 0; i < 1000; ++i) {
    RewardInputs in = axis_inputs(rng.uniform(1.0, 2.5), Vec3(0, 0, 1),
                                  rng.uniform(0.1, 3.0));
    for (Eigen::Index k = 0; k < in.joint_velocities.size(); ++k)
      in.joint_velocities(k) = rng.uniform(-2.0, 2.0);
    c.expect(sar_reward(in, cfg) == posture_reward(in, cfg), "sar == posture for d >= 1");
    if (!c.ok) break;
  }

  // fold symmetry on a 1,000-point grid
  for (int i = 0; i <= 1000; ++i) {
    const double phi = M_PI * i / 1000.0;
    c.expect(std::abs(direction_reward(phi) - direction_reward(M_PI - phi)) <= 1e-12,
             "fold symmetry at phi=" + std::to_string(phi));
    if (!c.ok) break;
  }

  const double elapsed = now_seconds() - t0;
  c.expect(elapsed < 5.0, "runtime under 5 s");
  std::printf("[%s] criterion 2: SAR/HAR structure (%.3f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criterion 3

int criterion_3() {
  const double t0 = now_seconds();
  Check c;
  Rng rng(90210);

  auto loss_value = [](const Mlp& net, const MatX& input, const MatX& cot) {
    return mlp_forward(net, input, nullptr).cwiseProduct(cot).sum();
  };

  double worst = 0.0;
  int nets_checked = 0;
  const int obs_dim = 15, act_dim = 2;
  for (int trial = 0; trial < 50; ++trial) {
    for (int net_kind = 0; net_kind < 2; ++net_kind) {
      Mlp net = net_kind == 0
                    ? make_mlp({obs_dim, 64, 64, act_dim}, Activation::relu,
                               OutputActivation::tanh, rng)
                    : make_mlp({obs_dim + act_dim, 64, 64, 1}, Activation::relu,
                               OutputActivation::linear, rng);
      MatX input(net.input_size(), 1);
      for (Eigen::Index i = 0; i < input.size(); ++i) input.data()[i] = rng.uniform(-1.5, 1.5);
      MatX cot(net.output_size(), 1);
      for (Eigen::Index i = 0; i < cot.size(); ++i) cot.data()[i] = rng.uniform(-1.0, 1.0);

      Tape tape;
      mlp_forward(net, input, &tape);
      MlpGrads grads = zero_grads(net);
      mlp_backward(net, tape, cot, grads);

      const double h = 1e-5;
      for (std::size_t l = 0; l < net.layer_count(); ++l) {
        auto check_block = [&](double* data, const double* analytic, Eigen::Index count) {
          for (Eigen::Index i = 0; i < count; ++i) {
            const double saved = data[i];
            data[i] = saved + h;
            const double up = loss_value(net, input, cot);
            data[i] = saved - h;
            const double down = loss_value(net, input, cot);
            data[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel = std::abs(analytic[i] - fd) /
                               std::max({std::abs(analytic[i]), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
          }
        };
        check_block(net.weights[l].data(), grads.dw[l].data(), net.weights[l].size());
        check_block(net.biases[l].data(), grads.db[l].data(), net.biases[l].size());
      }
      ++nets_checked;
    }
  }
  c.expect(nets_checked >= 100, "at least 100 nets");
  c.expect(worst < 1e-4, "max relative error " + std::to_string(worst));

  const double elapsed = now_seconds() - t0;
  c.expect(elapsed < 30.0, "runtime under 30 s");
  std::printf(
      "[%s] criterion 3: gradient check (%d nets, max rel err %.3g, %.1f s)%s%s\n",
      c.ok ? "PASS" : "FAIL", nets_checked, worst, elapsed, c.ok ? "" : " - ",
      c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criterion 4

using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat4 mat4_rotation(JointAxis axis, double angle) {
  const double cs = std::cos(angle), sn = std::sin(angle);
  Mat4 m = identity4();
  switch (axis) {
    case JointAxis::x: m[1][1] = cs; m[1][2] = -sn; m[2][1] = sn; m[2][2] = cs; break;
    case JointAxis::y: m[0][0] = cs; m[0][2] = sn; m[2][0] = -sn; m[2][2] = cs; break;
    case JointAxis::z: m[0][0] = cs; m[0][1] = -sn; m[1][0] = sn; m[1][1] = cs; break;
  }
  return m;
}

int criterion_4() {
  const double t0 = now_seconds();
  Check c;
  Rng rng(4242);

  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> links;
    std::vector<JointAxis> axes;
    VecX q(n);
    Mat4 frame = identity4();
    for (int i = 0; i < n; ++i) {
      links.push_back(rng.uniform(0.1, 1.0));
      const std::size_t pick = rng.uniform_index(3);
      axes.push_back(pick == 0 ? JointAxis::x : pick == 1 ? JointAxis::y : JointAxis::z);
      q(i) = rng.uniform(-M_PI, M_PI);
    }
    for (int i = 0; i < n; ++i) {
      frame = mat4_mul(frame, mat4_rotation(axes[static_cast<std::size_t>(i)], q(i)));
      Mat4 trans = identity4();
      trans[0][3] = links[static_cast<std::size_t>(i)];
      frame = mat4_mul(frame, trans);
    }
    const Pose pose = forward_kinematics<double>(q, links, axes);
    const Vec3 oracle_pos(frame[0][3], frame[1][3], frame[2][3]);
    c.expect((pose.position - oracle_pos).norm() <= 1e-10, "fk position vs oracle");
    if (!c.ok) break;
  }

  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    while (axis.norm() < 1e-3) axis = Vec3(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    const double angle = rng.uniform(0.01, 2.0 * M_PI - 0.01);
    RewardInputs in;
    in.joint_velocities = VecX::Zero(2);
    in.joint_count = 2;
    in.ee_quaternion = Quat(std::cos(angle / 2.0), axis.x() * std::sin(angle / 2.0),
                            axis.y() * std::sin(angle / 2.0), axis.z() * std::sin(angle / 2.0));
    const auto recovered = actual_direction(in, DirectionMode::quaternion_axis);
    c.expect(recovered && (*recovered - axis).norm() <= 1e-9, "axis-angle inversion");
  }

  const double elapsed = now_seconds() - t0;
  std::printf("[%s] criterion 4: kinematics oracle (%.3f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criterion 5

int criterion_5() {
  const double t0 = now_seconds();
  Check c;
  Rng rng(5005);

  // single-transition Bellman fixed point, default hyperparameters
  {
    AgentConfig cfg;  // defaults: batch 128, warmup 1000
    DdpgAgent agent(cfg, 3, 2, "fixture", 1);
    Transition t;
    t.observation = VecX::Zero(3);
    VecX action(2);
    action << 0.3, -0.4;
    t.action = action;
    t.reward = 0.0;
    t.next_observation = t.observation;
    t.done = true;
    t.success = true;
    for (int i = 0; i < cfg.warmup_steps + 5000; ++i) agent.observe_and_update(t);
    const double q = agent.q_value(t.observation, t.action);
    c.expect(std::abs(q) < 0.05, "fixed point |Q| = " + std::to_string(std::abs(q)));
  }

  // bandit: reward = -||a - a*||^2, one-step episodes, analytic optimum
  {
    AgentConfig cfg;
    DdpgAgent agent(cfg, 3, 2, "fixture", 2);
    VecX a_star(2);
    a_star << 0.4, -0.3;
    const VecX obs = VecX::Zero(3);
    VecX greedy = agent.act_greedy(obs);
    for (int step = 0; step < 20000; ++step) {
      const VecX a = agent.act(obs, true);
      Transition t;
      t.observation = obs;
      t.action = a;
      t.reward = -(a - a_star).squaredNorm();
      t.next_observation = obs;
      t.done = true;
      t.success = true;
      agent.observe_and_update(t);
    }
    greedy = agent.act_greedy(obs);
    const double gap = (greedy - a_star).norm();
    c.expect(gap < 0.1, "bandit distance " + std::to_string(gap));
  }

  const double elapsed = now_seconds() - t0;
  c.expect(elapsed < 300.0, "runtime under 5 min");
  std::printf("[%s] criterion 5: machinery fixed points (%.1f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criteria 6-8

// Desk-scale recipe: the planar preset with a wider exploration noise than
// the agent default (the success ball must be reachable by exploration
// jitter) and the displacement direction mode (a planar arm's pose
// quaternion axis is constant, which would starve the direction term of
// information).
RunConfig desk_run(Algorithm algorithm, RewardKind kind, std::uint64_t seed) {
  RunConfig cfg;
  cfg.episodes = 3000;
  cfg.steps_per_episode = 50;
  cfg.seed = seed;
  cfg.arm = ArmConfig::planar_2dof();
  cfg.agent.algorithm = algorithm;
  cfg.agent.exploration_noise = 0.2;
  cfg.reward.kind = kind;
  cfg.reward.config.beta = cfg.arm.beta;
  cfg.reward.config.direction_mode = DirectionMode::displacement;
  cfg.eval_trials = 200;
  return cfg;
}

int criterion_6() {
  Check c;
  int passing = 0;
  double worst_time = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const double t0 = now_seconds();
    const TrainResult r = train(desk_run(Algorithm::ddpg, RewardKind::sar, seed));
    const double elapsed = now_seconds() - t0;
    worst_time = std::max(worst_time, elapsed);
    if (!r.summary.failed && r.summary.eval_success_rate >= 0.80) ++passing;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " seed%llu=%.1f%%/%.0fs",
                  static_cast<unsigned long long>(seed),
                  100.0 * r.summary.eval_success_rate, elapsed);
    per_seed += buf;
    c.expect(elapsed < 900.0, "a seed exceeded 15 minutes");
  }
  c.expect(passing >= 2, "fewer than 2 of 3 seeds reached 80%");
  std::printf("[%s] criterion 6: desk-scale DDPG+SAR learning (%d/3 seeds >= 80%%,%s)\n",
              c.ok ? "PASS" : "FAIL", passing, per_seed.c_str());
  return c.ok ? 0 : 1;
}

int criterion_7() {
  const double t0 = now_seconds();
  Check c;
  std::vector<RunConfig> cells;
  for (RewardKind kind : {RewardKind::sar, RewardKind::stride, RewardKind::posture})
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull, 6ull, 7ull}) {
      RunConfig cfg = desk_run(Algorithm::ddpg, kind, seed);
      // At desk scale the plateau-to-noise ratio is small: with the default
      // fraction the threshold sits ~2 sigma of a trailing-window mean below
      // the plateau, so E_start measures the last noise dip instead of the
      // rise. 0.7 places the threshold ~6 sigma clear of the noise band.
      cfg.convergence_fraction = 0.7;
      cfg.eval_trials = 20;  // only training metrics matter here
      cells.push_back(cfg);
    }
  const std::vector<RunSummary> summaries = run_sweep(cells, 2);

  auto medians = [&](RewardKind kind) {
    std::vector<double> e_starts, stdevs;
    for (const auto& s : summaries) {
      if (s.reward_kind != to_string(kind)) continue;
      if (s.failed) continue;
      e_starts.push_back(s.converged ? static_cast<double>(s.e_start)
                                     : static_cast<double>(s.episodes + 1));
      stdevs.push_back(s.reward_stdev.value_or(1e9));
    }
    return std::make_pair(median(e_starts), median(stdevs));
  };
  const auto [sar_e, sar_sd] = medians(RewardKind::sar);
  const auto [stride_e, stride_sd] = medians(RewardKind::stride);
  const auto [posture_e, posture_sd] = medians(RewardKind::posture);
  (void)stride_sd;
  (void)posture_e;

  c.expect(sar_e < stride_e, "median E_start(sar) >= median E_start(stride)");
  c.expect(sar_sd <= posture_sd, "median V_STDEV(sar) > median V_STDEV(posture)");
  const double elapsed = now_seconds() - t0;
  c.expect(elapsed < 7200.0, "runtime over 2 h");
  std::printf(
      "[%s] criterion 7: ordering, 7 seeds (E_start median sar=%.0f stride=%.0f; "
      "V_STDEV median sar=%.3f posture=%.3f; %.0f s)%s%s\n",
      c.ok ? "PASS" : "FAIL", sar_e, stride_e, sar_sd, posture_sd, elapsed,
      c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

int criterion_8() {
  const TrainResult r = train(desk_run(Algorithm::ddpg, RewardKind::basic, 1));
  const double rate = r.summary.eval_success_rate;
  std::printf(
      "[RECORDED] criterion 8: sparse-baseline success %.1f%% over %d trials "
      "(diagnostic, %sconsistent with the expected < 50%%)\n",
      100.0 * rate, r.summary.eval_trials, rate < 0.5 ? "" : "NOT ");
  return 0;  // non-gating by specification
}

// ---------------------------------------------------------------- criterion 9

int criterion_9() {
  const double t0 = now_seconds();
  Check c;

  // byte-identical reruns
  const fs::path root = fs::temp_directory_path() / "reachlab_acceptance_det";
  fs::remove_all(root);
  RunConfig cfg = desk_run(Algorithm::ddpg, RewardKind::sar, 11);
  cfg.episodes = 40;
  cfg.steps_per_episode = 30;
  cfg.agent.warmup_steps = 200;  // updates happen inside the rerun window
  cfg.eval_trials = 5;
  cfg.output_dir = (root / "a").string();
  train(cfg);
  cfg.output_dir = (root / "b").string();
  train(cfg);
  auto read_bytes = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = read_bytes((root / "a" / "episodes.csv").string());
  const std::string b = read_bytes((root / "b" / "episodes.csv").string());
  c.expect(!a.empty() && a == b, "episodes.csv not byte-identical across reruns");
  fs::remove_all(root);

  // 500-step scripted differential test: bridge vs in-process
  {
    const ArmConfig arm = ArmConfig::planar_2dof();
    BridgeSession session(arm);
    ArmEnv env(arm);
    RewardSpec spec;
    spec.config.beta = arm.beta;
    Rng rng(909);
    std::uint64_t seed = 50;
    nlohmann::json response =
        nlohmann::json::parse(session.handle_line("{\"v\":1,\"cmd\":\"reset\",\"seed\":50}"));
    env.reset(seed);
    int compared = 0;
    for (int step = 0; step < 500; ++step) {
      VecX action(2);
      action << std::sin(0.05 * step) * rng.uniform(0.2, 1.0), rng.uniform(-1.0, 1.0);
      const Transition tr = env.step(action, spec);
      nlohmann::json req;
      req["v"] = 1;
      req["cmd"] = "step";
      req["action"] = {action(0), action(1)};
      response = nlohmann::json::parse(session.handle_line(req.dump()));
      c.expect(!response.contains("error"), "bridge error mid-script");
      if (!c.ok) break;
      c.expect(response.at("done").get<bool>() == tr.done, "done mismatch");
      c.expect(response.at("success").get<bool>() == tr.success, "success mismatch");
      c.expect(response.at("d_pt").get<double>() == env.state().d_pt, "d_pt mismatch");
      const VecX obs = env.observe(env.state());
      for (Eigen::Index i = 0; i < obs.size() && c.ok; ++i)
        c.expect(response.at("obs")[static_cast<std::size_t>(i)].get<double>() == obs(i),
                 "obs mismatch");
      for (int i = 0; i < 3 && c.ok; ++i) {
        c.expect(response.at("ee_pos")[static_cast<std::size_t>(i)].get<double>() ==
                     env.state().ee_pose.position(i),
                 "ee_pos mismatch");
        c.expect(response.at("target")[static_cast<std::size_t>(i)].get<double>() ==
                     env.state().target(i),
                 "target mismatch");
      }
      const Quat& q = env.state().ee_pose.orientation;
      c.expect(response.at("ee_quat")[0].get<double>() == q.x() &&
                   response.at("ee_quat")[1].get<double>() == q.y() &&
                   response.at("ee_quat")[2].get<double>() == q.z() &&
                   response.at("ee_quat")[3].get<double>() == q.w(),
               "ee_quat mismatch");
      for (Eigen::Index i = 0; i < 2 && c.ok; ++i)
        c.expect(response.at("qvel")[static_cast<std::size_t>(i)].get<double>() ==
                     env.state().joint_velocities(i),
                 "qvel mismatch");
      ++compared;
      if (!c.ok) break;
      if (tr.done) {
        ++seed;
        nlohmann::json reset;
        reset["v"] = 1;
        reset["cmd"] = "reset";
        reset["seed"] = seed;
        response = nlohmann::json::parse(session.handle_line(reset.dump()));
        env.reset(seed);
        c.expect(response.at("d_pt").get<double>() == env.state().d_pt,
                 "reset d_pt mismatch");
      }
    }
    c.expect(compared == 500, "differential script did not run 500 steps");
  }

  const double elapsed = now_seconds() - t0;
  std::printf("[%s] criterion 9: determinism and bridge equivalence (%.1f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

// ---------------------------------------------------------------- criterion 10

int criterion_10() {
  const double t0 = now_seconds();
  Check c;
  Rng rng(1010);

  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const int m = 50 + static_cast<int>(rng.uniform_index(300));
    std::vector<EpisodeRecord> records;
    for (int i = 0; i < m; ++i) {
      EpisodeRecord r;
      r.episode = i + 1;
      r.reward = rng.uniform(-30.0, 30.0);
      r.steps_used = 1 + static_cast<int>(rng.uniform_index(50));
      records.push_back(r);
    }
    const int e_start = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(m - 2)));
    const RunSummary s = summarize(records, e_start);

    // textbook two-pass oracle
    double mean = 0.0;
    const std::size_t begin = static_cast<std::size_t>(e_start - 1);
    const double count = static_cast<double>(records.size() - begin);
    for (std::size_t i = begin; i < records.size(); ++i) mean += records[i].reward;
    mean /= count;
    double ss = 0.0;
    for (std::size_t i = begin; i < records.size(); ++i)
      ss += (records[i].reward - mean) * (records[i].reward - mean);
    const double stdev = std::sqrt(ss / (count - 1.0));
    c.expect(std::abs(s.mean_reward - mean) <= 1e-10, "mean vs two-pass oracle");
    c.expect(std::abs(s.reward_stdev.value() - stdev) <= 1e-10, "stdev vs two-pass oracle");
  }

  // the reference convergence-speedup pair
  {
    RunSummary sar;
    sar.algorithm = "sac";
    sar.reward_kind = "sar";
    sar.converged = true;
    sar.e_start = 3593;
    sar.episodes = 10000;
    sar.mean_reward = 16.830;
    sar.reward_stdev = 7.594;
    sar.eval_success_rate = 0.97;
    RunSummary stride = sar;
    stride.reward_kind = "stride";
    stride.e_start = 6773;
    stride.mean_reward = 16.125;
    stride.reward_stdev = 9.728;
    stride.eval_success_rate = 0.908;
    const Comparison cmp = compare({sar, stride});
    bool found = false;
    for (const auto& line : cmp.delta_lines)
      if (line.find("-46.9%") != std::string::npos) found = true;
    c.expect(found, "46.9% speedup not reported for the 3593/6773 pair");
  }

  const double elapsed = now_seconds() - t0;
  std::printf("[%s] criterion 10: metrics arithmetic (%.2f s)%s%s\n",
              c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " - ", c.detail.c_str());
  return c.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  using CriterionFn = int (*)();
  const std::array<CriterionFn, 10> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};

  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: %s [1-10]\n", argv[0]);
      return 2;
    }
    return criteria[static_cast<std::size_t>(n - 1)]();
  }
  int failures = 0;
  for (const auto& fn : criteria) failures += fn();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
