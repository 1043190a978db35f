#include "reachlab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace reachlab {

const char* to_string(Algorithm a) { return a == Algorithm::ddpg ? "ddpg" : "sac"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "ddpg") return Algorithm::ddpg;
  if (s == "sac") return Algorithm::sac;
  throw std::invalid_argument("unknown algorithm: \"" + s + "\"");
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("agent: gamma must be in (0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("agent: tau must be in (0,1]");
  if (batch_size < 1) throw std::invalid_argument("agent: batch_size must be >= 1");
  if (buffer_capacity < batch_size)
    throw std::invalid_argument("agent: buffer_capacity must be >= batch_size");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0) || !(temperature_lr > 0.0))
    throw std::invalid_argument("agent: learning rates must be > 0");
  if (exploration_noise < 0.0) throw std::invalid_argument("agent: exploration_noise must be >= 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("agent: temperature must be > 0");
  if (warmup_steps < 0) throw std::invalid_argument("agent: warmup_steps must be >= 0");
  if (hidden_sizes.empty()) throw std::invalid_argument("agent: hidden_sizes must not be empty");
  for (int h : hidden_sizes)
    if (h < 1) throw std::invalid_argument("agent: hidden sizes must be >= 1");
}

// --- replay buffer -----------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay buffer: capacity must be > 0");
  storage_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(StoredTransition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (batch > size()) throw std::invalid_argument("replay buffer: not enough samples");
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = rng.uniform_index(size());
  return idx;
}

// --- shared helpers ----------------------------------------------------------

namespace {

std::vector<int> actor_sizes(int obs_dim, int out_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out_dim);
  return sizes;
}

std::vector<int> critic_sizes(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{obs_dim + act_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

MatX concat_rows(const MatX& top, const MatX& bottom) {
  MatX out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

struct Batch {
  std::vector<StoredTransition> items;
  MatX obs, act, next_obs;
  VecX reward, not_terminal;
};

Batch gather(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx,
             int obs_dim, int act_dim) {
  Batch b;
  const auto n = static_cast<Eigen::Index>(idx.size());
  b.obs.resize(obs_dim, n);
  b.act.resize(act_dim, n);
  b.next_obs.resize(obs_dim, n);
  b.reward.resize(n);
  b.not_terminal.resize(n);
  b.items.reserve(idx.size());
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& t = buffer.at(idx[static_cast<std::size_t>(c)]);
    b.items.push_back(t);
    b.obs.col(c) = t.observation;
    b.act.col(c) = t.action;
    b.next_obs.col(c) = t.next_observation;
    b.reward(c) = t.reward;
    b.not_terminal(c) = t.terminal ? 0.0 : 1.0;
  }
  return b;
}

MatX batch_matrix(const std::vector<StoredTransition>& items,
                  int rows, bool next_obs) {
  MatX m(rows, static_cast<Eigen::Index>(items.size()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    m.col(c) = next_obs ? items[static_cast<std::size_t>(c)].next_observation
                        : items[static_cast<std::size_t>(c)].observation;
  return m;
}

MatX normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatX m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

VecX uniform_action(int act_dim, Rng& rng) {
  VecX a(act_dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.uniform(-1.0, 1.0);
  return a;
}

StoredTransition to_stored(const Transition& t) {
  return {t.observation, t.action, t.reward, t.next_observation, t.success};
}

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;

}  // namespace

// --- DDPG --------------------------------------------------------------------

DdpgAgent::DdpgAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
                     std::uint64_t seed)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      obs_layout_(std::move(obs_layout)),
      buffer_(static_cast<std::size_t>(cfg_.buffer_capacity)),
      rng_(seed) {
  cfg_.validate();
  state_.actor = make_mlp(actor_sizes(obs_dim_, act_dim_, cfg_.hidden_sizes),
                          Activation::relu, OutputActivation::tanh, rng_, 0.01);
  state_.critic = make_mlp(critic_sizes(obs_dim_, act_dim_, cfg_.hidden_sizes),
                           Activation::relu, OutputActivation::linear, rng_);
  state_.target_actor = state_.actor;
  state_.target_critic = state_.critic;
  state_.actor_opt = make_adam_state(state_.actor);
  state_.critic_opt = make_adam_state(state_.critic);
}

DdpgAgent::DdpgAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
                     DdpgState state, Rng rng, std::int64_t steps_observed)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      obs_layout_(std::move(obs_layout)),
      state_(std::move(state)),
      buffer_(static_cast<std::size_t>(cfg_.buffer_capacity)),
      rng_(rng),
      steps_observed_(steps_observed) {
  cfg_.validate();
  state_.actor.check_shapes();
  state_.critic.check_shapes();
  state_.target_actor.check_shapes();
  state_.target_critic.check_shapes();
}

VecX DdpgAgent::act_greedy(const VecX& observation) const {
  if (observation.size() != obs_dim_)
    throw std::invalid_argument("act: observation size mismatch");
  return mlp_forward(state_.actor, observation);
}

VecX DdpgAgent::act(const VecX& observation, bool explore) {
  if (!explore) return act_greedy(observation);
  if (steps_observed_ < cfg_.warmup_steps) return uniform_action(act_dim_, rng_);
  VecX a = act_greedy(observation);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a(i) = std::clamp(a(i) + cfg_.exploration_noise * rng_.normal(), -1.0, 1.0);
  return a;
}

VecX DdpgAgent::critic_targets(const std::vector<StoredTransition>& batch) const {
  const MatX s2 = batch_matrix(batch, obs_dim_, true);
  const MatX a2 = mlp_forward(state_.target_actor, s2, nullptr);
  const MatX q2 = mlp_forward(state_.target_critic, concat_rows(s2, a2), nullptr);
  VecX y(static_cast<Eigen::Index>(batch.size()));
  for (Eigen::Index c = 0; c < y.size(); ++c) {
    const auto& t = batch[static_cast<std::size_t>(c)];
    y(c) = t.reward + cfg_.gamma * (t.terminal ? 0.0 : 1.0) * q2(0, c);
  }
  return y;
}

double DdpgAgent::q_value(const VecX& observation, const VecX& action) const {
  MatX in(obs_dim_ + act_dim_, 1);
  in.topRows(obs_dim_) = observation;
  in.bottomRows(act_dim_) = action;
  return mlp_forward(state_.critic, in, nullptr)(0, 0);
}

UpdateDiagnostics DdpgAgent::observe_and_update(const Transition& transition) {
  buffer_.push(to_stored(transition));
  ++steps_observed_;
  if (steps_observed_ <= cfg_.warmup_steps) return {};
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return {};
  return update();
}

UpdateDiagnostics DdpgAgent::update() {
  const auto batch_n = static_cast<Eigen::Index>(cfg_.batch_size);
  const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), rng_);
  Batch b = gather(buffer_, idx, obs_dim_, act_dim_);

  const VecX y = critic_targets(b.items);

  // critic regression toward y
  Tape critic_tape;
  const MatX q = mlp_forward(state_.critic, concat_rows(b.obs, b.act), &critic_tape);
  const Eigen::RowVectorXd err = q.row(0) - y.transpose();
  const double critic_loss = err.squaredNorm() / static_cast<double>(batch_n);

  // actor ascends Q(s, mu(s))
  Tape actor_tape;
  const MatX a_pred = mlp_forward(state_.actor, b.obs, &actor_tape);
  Tape q_tape;
  const MatX q_pi = mlp_forward(state_.critic, concat_rows(b.obs, a_pred), &q_tape);
  const double actor_loss = -q_pi.mean();

  if (!std::isfinite(critic_loss) || !std::isfinite(actor_loss))
    throw AgentDivergenceError("ddpg: non-finite loss");

  MlpGrads critic_grads = zero_grads(state_.critic);
  mlp_backward(state_.critic, critic_tape, (2.0 / batch_n) * err, critic_grads);
  adam_step(state_.critic, critic_grads, state_.critic_opt, cfg_.critic_lr);

  MlpGrads critic_scratch = zero_grads(state_.critic);
  const MatX d_input = mlp_backward(
      state_.critic, q_tape, MatX::Constant(1, batch_n, -1.0 / batch_n), critic_scratch);
  MlpGrads actor_grads = zero_grads(state_.actor);
  mlp_backward(state_.actor, actor_tape, d_input.bottomRows(act_dim_), actor_grads);
  adam_step(state_.actor, actor_grads, state_.actor_opt, cfg_.actor_lr);

  soft_update(state_.target_critic, state_.critic, cfg_.tau);
  soft_update(state_.target_actor, state_.actor, cfg_.tau);

  UpdateDiagnostics diag;
  diag.updated = true;
  diag.critic_loss = critic_loss;
  diag.actor_loss = actor_loss;
  return diag;
}

std::uint64_t DdpgAgent::parameter_hash() const {
  std::uint64_t h = reachlab::parameter_hash(state_.actor);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.critic);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.target_actor);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.target_critic);
  return h;
}

// --- SAC ---------------------------------------------------------------------

SacAgent::SacAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
                   std::uint64_t seed)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      obs_layout_(std::move(obs_layout)),
      buffer_(static_cast<std::size_t>(cfg_.buffer_capacity)),
      rng_(seed) {
  cfg_.validate();
  state_.actor = make_mlp(actor_sizes(obs_dim_, 2 * act_dim_, cfg_.hidden_sizes),
                          Activation::relu, OutputActivation::linear, rng_, 0.01);
  state_.critic1 = make_mlp(critic_sizes(obs_dim_, act_dim_, cfg_.hidden_sizes),
                            Activation::relu, OutputActivation::linear, rng_);
  state_.critic2 = make_mlp(critic_sizes(obs_dim_, act_dim_, cfg_.hidden_sizes),
                            Activation::relu, OutputActivation::linear, rng_);
  state_.target_critic1 = state_.critic1;
  state_.target_critic2 = state_.critic2;
  state_.actor_opt = make_adam_state(state_.actor);
  state_.critic1_opt = make_adam_state(state_.critic1);
  state_.critic2_opt = make_adam_state(state_.critic2);
  state_.log_alpha = std::log(cfg_.temperature);
}

SacAgent::SacAgent(AgentConfig cfg, int obs_dim, int act_dim, std::string obs_layout,
                   SacState state, Rng rng, std::int64_t steps_observed)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      obs_layout_(std::move(obs_layout)),
      state_(std::move(state)),
      buffer_(static_cast<std::size_t>(cfg_.buffer_capacity)),
      rng_(rng),
      steps_observed_(steps_observed) {
  cfg_.validate();
  state_.actor.check_shapes();
  state_.critic1.check_shapes();
  state_.critic2.check_shapes();
  state_.target_critic1.check_shapes();
  state_.target_critic2.check_shapes();
}

double SacAgent::alpha() const { return std::exp(state_.log_alpha); }

namespace {

struct PolicyHeads {
  MatX mean;
  MatX log_std_raw;   // pre-clamp, for the gradient mask
  MatX log_std;
  MatX std_dev;
};

PolicyHeads split_heads(const MatX& actor_out, int act_dim) {
  PolicyHeads h;
  h.mean = actor_out.topRows(act_dim);
  h.log_std_raw = actor_out.bottomRows(act_dim);
  h.log_std = h.log_std_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  h.std_dev = h.log_std.array().exp().matrix();
  return h;
}

// log pi of the squashed-Gaussian sample a = tanh(mean + std * eps)
Eigen::RowVectorXd squashed_log_prob(const PolicyHeads& h, const MatX& eps, const MatX& a) {
  const auto act_dim = static_cast<double>(a.rows());
  Eigen::RowVectorXd logpi =
      (-0.5 * eps.array().square()).colwise().sum().matrix() -
      h.log_std.colwise().sum() -
      Eigen::RowVectorXd::Constant(a.cols(), 0.5 * act_dim * std::log(2.0 * M_PI));
  logpi -= (1.0 - a.array().square() + kSquashEps).log().colwise().sum().matrix();
  return logpi;
}

}  // namespace

VecX SacAgent::act_greedy(const VecX& observation) const {
  if (observation.size() != obs_dim_)
    throw std::invalid_argument("act: observation size mismatch");
  const VecX out = mlp_forward(state_.actor, observation);
  return out.head(act_dim_).array().tanh().matrix();
}

VecX SacAgent::act(const VecX& observation, bool explore) {
  if (!explore) return act_greedy(observation);
  if (steps_observed_ < cfg_.warmup_steps) return uniform_action(act_dim_, rng_);
  if (observation.size() != obs_dim_)
    throw std::invalid_argument("act: observation size mismatch");
  const VecX out = mlp_forward(state_.actor, observation);
  VecX a(act_dim_);
  for (int i = 0; i < act_dim_; ++i) {
    const double log_std = std::clamp(out(act_dim_ + i), kLogStdMin, kLogStdMax);
    a(i) = std::tanh(out(i) + std::exp(log_std) * rng_.normal());
  }
  return a;
}

VecX SacAgent::critic_targets(const std::vector<StoredTransition>& batch,
                              const MatX& next_action_noise) const {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (next_action_noise.rows() != act_dim_ || next_action_noise.cols() != n)
    throw std::invalid_argument("sac: noise shape mismatch");
  const MatX s2 = batch_matrix(batch, obs_dim_, true);
  const PolicyHeads h = split_heads(mlp_forward(state_.actor, s2, nullptr), act_dim_);
  const MatX u = h.mean + h.std_dev.cwiseProduct(next_action_noise);
  const MatX a2 = u.array().tanh().matrix();
  const Eigen::RowVectorXd logpi = squashed_log_prob(h, next_action_noise, a2);
  const MatX sa2 = concat_rows(s2, a2);
  const MatX q1 = mlp_forward(state_.target_critic1, sa2, nullptr);
  const MatX q2 = mlp_forward(state_.target_critic2, sa2, nullptr);
  const double a_coef = std::exp(state_.log_alpha);
  VecX y(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& t = batch[static_cast<std::size_t>(c)];
    const double q_min = std::min(q1(0, c), q2(0, c));
    y(c) = t.reward +
           cfg_.gamma * (t.terminal ? 0.0 : 1.0) * (q_min - a_coef * logpi(c));
  }
  return y;
}

double SacAgent::q_value(const VecX& observation, const VecX& action) const {
  MatX in(obs_dim_ + act_dim_, 1);
  in.topRows(obs_dim_) = observation;
  in.bottomRows(act_dim_) = action;
  const double q1 = mlp_forward(state_.critic1, in, nullptr)(0, 0);
  const double q2 = mlp_forward(state_.critic2, in, nullptr)(0, 0);
  return std::min(q1, q2);
}

UpdateDiagnostics SacAgent::observe_and_update(const Transition& transition) {
  buffer_.push(to_stored(transition));
  ++steps_observed_;
  if (steps_observed_ <= cfg_.warmup_steps) return {};
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return {};
  return update();
}

UpdateDiagnostics SacAgent::update() {
  const auto batch_n = static_cast<Eigen::Index>(cfg_.batch_size);
  const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), rng_);
  Batch b = gather(buffer_, idx, obs_dim_, act_dim_);
  const double a_coef = std::exp(state_.log_alpha);

  // critic targets (fresh next-action noise, drawn first for determinism)
  const MatX eps_next = normal_matrix(act_dim_, batch_n, rng_);
  const VecX y = critic_targets(b.items, eps_next);

  const MatX sa = concat_rows(b.obs, b.act);
  Tape tape1, tape2;
  const MatX q1 = mlp_forward(state_.critic1, sa, &tape1);
  const MatX q2 = mlp_forward(state_.critic2, sa, &tape2);
  const Eigen::RowVectorXd err1 = q1.row(0) - y.transpose();
  const Eigen::RowVectorXd err2 = q2.row(0) - y.transpose();
  const double critic_loss =
      (err1.squaredNorm() + err2.squaredNorm()) / static_cast<double>(batch_n);

  // actor: minimize alpha * logpi - min(Q1, Q2) under reparameterized sampling
  Tape actor_tape;
  const MatX actor_out = mlp_forward(state_.actor, b.obs, &actor_tape);
  const PolicyHeads h = split_heads(actor_out, act_dim_);
  const MatX eps = normal_matrix(act_dim_, batch_n, rng_);
  const MatX u = h.mean + h.std_dev.cwiseProduct(eps);
  const MatX a_pol = u.array().tanh().matrix();
  const MatX corr = (1.0 - a_pol.array().square()).matrix();
  const Eigen::RowVectorXd logpi = squashed_log_prob(h, eps, a_pol);

  const MatX sa_pol = concat_rows(b.obs, a_pol);
  Tape q1_tape, q2_tape;
  const MatX q1_pi = mlp_forward(state_.critic1, sa_pol, &q1_tape);
  const MatX q2_pi = mlp_forward(state_.critic2, sa_pol, &q2_tape);

  double actor_loss = 0.0;
  Eigen::RowVectorXd d_min1 = Eigen::RowVectorXd::Zero(batch_n);
  Eigen::RowVectorXd d_min2 = Eigen::RowVectorXd::Zero(batch_n);
  for (Eigen::Index c = 0; c < batch_n; ++c) {
    actor_loss += a_coef * logpi(c) - std::min(q1_pi(0, c), q2_pi(0, c));
    if (q1_pi(0, c) <= q2_pi(0, c))
      d_min1(c) = -1.0 / static_cast<double>(batch_n);
    else
      d_min2(c) = -1.0 / static_cast<double>(batch_n);
  }
  actor_loss /= static_cast<double>(batch_n);

  if (!std::isfinite(critic_loss) || !std::isfinite(actor_loss))
    throw AgentDivergenceError("sac: non-finite loss");

  // critic updates
  MlpGrads g1 = zero_grads(state_.critic1);
  mlp_backward(state_.critic1, tape1, (2.0 / batch_n) * err1, g1);
  adam_step(state_.critic1, g1, state_.critic1_opt, cfg_.critic_lr);
  MlpGrads g2 = zero_grads(state_.critic2);
  mlp_backward(state_.critic2, tape2, (2.0 / batch_n) * err2, g2);
  adam_step(state_.critic2, g2, state_.critic2_opt, cfg_.critic_lr);

  // actor gradient: critic route (through the per-column minimum) ...
  MlpGrads scratch1 = zero_grads(state_.critic1);
  MlpGrads scratch2 = zero_grads(state_.critic2);
  const MatX d_in1 = mlp_backward(state_.critic1, q1_tape, d_min1, scratch1);
  const MatX d_in2 = mlp_backward(state_.critic2, q2_tape, d_min2, scratch2);
  MatX d_action = d_in1.bottomRows(act_dim_) + d_in2.bottomRows(act_dim_);
  // ... plus the entropy route through log pi
  d_action += (a_coef / static_cast<double>(batch_n)) *
              (2.0 * a_pol.array() / (corr.array() + kSquashEps)).matrix();

  const MatX g_u = d_action.cwiseProduct(corr);
  const MatX g_mean = g_u;
  MatX g_log_std = g_u.cwiseProduct(h.std_dev.cwiseProduct(eps));
  g_log_std.array() -= a_coef / static_cast<double>(batch_n);
  // clamp saturates the log-std head outside [min, max]
  g_log_std = g_log_std.cwiseProduct(
      ((h.log_std_raw.array() > kLogStdMin) && (h.log_std_raw.array() < kLogStdMax))
          .cast<double>()
          .matrix());

  MlpGrads actor_grads = zero_grads(state_.actor);
  mlp_backward(state_.actor, actor_tape, concat_rows(g_mean, g_log_std), actor_grads);
  adam_step(state_.actor, actor_grads, state_.actor_opt, cfg_.actor_lr);

  // temperature
  if (cfg_.auto_temperature) {
    const double target_entropy = -static_cast<double>(act_dim_);
    const double grad = -(logpi.mean() + target_entropy);
    state_.alpha_step += 1;
    const double beta1 = 0.9, beta2 = 0.999, eps_adam = 1e-8;
    state_.alpha_m = beta1 * state_.alpha_m + (1.0 - beta1) * grad;
    state_.alpha_v = beta2 * state_.alpha_v + (1.0 - beta2) * grad * grad;
    const double m_hat =
        state_.alpha_m / (1.0 - std::pow(beta1, static_cast<double>(state_.alpha_step)));
    const double v_hat =
        state_.alpha_v / (1.0 - std::pow(beta2, static_cast<double>(state_.alpha_step)));
    state_.log_alpha -= cfg_.temperature_lr * m_hat / (std::sqrt(v_hat) + eps_adam);
  }

  soft_update(state_.target_critic1, state_.critic1, cfg_.tau);
  soft_update(state_.target_critic2, state_.critic2, cfg_.tau);

  UpdateDiagnostics diag;
  diag.updated = true;
  diag.critic_loss = critic_loss;
  diag.actor_loss = actor_loss;
  diag.temperature = std::exp(state_.log_alpha);
  return diag;
}

std::uint64_t SacAgent::parameter_hash() const {
  std::uint64_t h = reachlab::parameter_hash(state_.actor);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.critic1);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.critic2);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.target_critic1);
  h = h * 0x100000001b3ull ^ reachlab::parameter_hash(state_.target_critic2);
  std::uint64_t alpha_bits;
  static_assert(sizeof(alpha_bits) == sizeof(state_.log_alpha));
  std::memcpy(&alpha_bits, &state_.log_alpha, sizeof(alpha_bits));
  return h * 0x100000001b3ull ^ alpha_bits;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, int obs_dim, int act_dim,
                                  std::string obs_layout, std::uint64_t seed) {
  if (cfg.algorithm == Algorithm::ddpg)
    return std::make_unique<DdpgAgent>(cfg, obs_dim, act_dim, std::move(obs_layout), seed);
  return std::make_unique<SacAgent>(cfg, obs_dim, act_dim, std::move(obs_layout), seed);
}

}  // namespace reachlab
