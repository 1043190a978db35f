#include "reachlab/neuro.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace reachlab {

const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "tanh";
}

const char* to_string(OutputActivation a) {
  return a == OutputActivation::linear ? "linear" : "tanh";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation: \"" + s + "\"");
}

OutputActivation output_activation_from_string(const std::string& s) {
  if (s == "linear") return OutputActivation::linear;
  if (s == "tanh") return OutputActivation::tanh;
  throw std::invalid_argument("unknown output activation: \"" + s + "\"");
}

void Mlp::check_shapes() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("mlp: need at least 2 layers");
  const std::size_t n_layers = layer_sizes.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers ||
      hidden_activations.size() != n_layers - 1)
    throw std::invalid_argument("mlp: layer list sizes are inconsistent");
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1])
      throw std::invalid_argument("mlp: weight shapes do not chain");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw std::invalid_argument("mlp: non-finite parameters");
  }
}

Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             OutputActivation output, Rng& rng, double final_layer_scale) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("mlp: need at least 2 layers");
  Mlp net;
  net.layer_sizes = layer_sizes;
  net.output_activation = output;
  const std::size_t n_layers = layer_sizes.size() - 1;
  net.hidden_activations.assign(n_layers - 1, hidden);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (l == n_layers - 1) ? final_layer_scale : 1.0;
    MatX w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = scale * rng.uniform(-bound, bound);
    VecX b(fan_out);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = scale * rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

namespace {

void apply_activation(MatX& x, Activation a) {
  if (a == Activation::relu)
    x = x.cwiseMax(0.0);
  else
    x = x.array().tanh().matrix();
}

}  // namespace

MatX mlp_forward(const Mlp& net, const MatX& input, Tape* tape) {
  if (input.rows() != net.input_size())
    throw std::invalid_argument("mlp_forward: input size mismatch");
  if (tape) {
    tape->input = input;
    tape->pre.clear();
    tape->post.clear();
  }
  MatX x = input;
  const std::size_t n_layers = net.layer_count();
  for (std::size_t l = 0; l < n_layers; ++l) {
    MatX z = (net.weights[l] * x).colwise() + net.biases[l];
    if (tape) tape->pre.push_back(z);
    if (l + 1 < n_layers) {
      apply_activation(z, net.hidden_activations[l]);
    } else if (net.output_activation == OutputActivation::tanh) {
      z = z.array().tanh().matrix();
    }
    if (tape) tape->post.push_back(z);
    x = std::move(z);
  }
  return x;
}

VecX mlp_forward(const Mlp& net, const VecX& input) {
  return mlp_forward(net, MatX(input), nullptr).col(0);
}

MlpGrads zero_grads(const Mlp& net) {
  MlpGrads g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.dw.emplace_back(MatX::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.db.emplace_back(VecX::Zero(net.biases[l].size()));
  }
  return g;
}

MatX mlp_backward(const Mlp& net, const Tape& tape, const MatX& output_gradient,
                  MlpGrads& grads) {
  const std::size_t n_layers = net.layer_count();
  if (tape.pre.size() != n_layers || tape.post.size() != n_layers)
    throw std::invalid_argument("mlp_backward: tape does not match network");
  if (output_gradient.rows() != net.output_size() ||
      output_gradient.cols() != tape.input.cols())
    throw std::invalid_argument("mlp_backward: output gradient shape mismatch");
  if (grads.dw.size() != n_layers || grads.db.size() != n_layers)
    grads = zero_grads(net);

  MatX delta = output_gradient;
  if (net.output_activation == OutputActivation::tanh)
    delta = delta.cwiseProduct(
        (1.0 - tape.post.back().array().square()).matrix());

  for (std::size_t l = n_layers; l-- > 0;) {
    const MatX& layer_input = (l == 0) ? tape.input : tape.post[l - 1];
    grads.dw[l].noalias() = delta * layer_input.transpose();
    grads.db[l] = delta.rowwise().sum();
    if (l == 0) return net.weights[0].transpose() * delta;
    MatX upstream = net.weights[l].transpose() * delta;
    if (net.hidden_activations[l - 1] == Activation::relu) {
      delta = upstream.cwiseProduct(
          (tape.pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = upstream.cwiseProduct(
          (1.0 - tape.post[l - 1].array().square()).matrix());
    }
  }
  return {};
}

AdamState make_adam_state(const Mlp& net) {
  AdamState s;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    s.m_w.emplace_back(MatX::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_w.emplace_back(MatX::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_b.emplace_back(VecX::Zero(net.biases[l].size()));
    s.v_b.emplace_back(VecX::Zero(net.biases[l].size()));
  }
  return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double learning_rate) {
  const std::size_t n_layers = net.layer_count();
  if (grads.dw.size() != n_layers || grads.db.size() != n_layers)
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  for (std::size_t l = 0; l < n_layers; ++l)
    if (!grads.dw[l].allFinite() || !grads.db[l].allFinite())
      throw std::invalid_argument("adam_step: non-finite gradient");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < n_layers; ++l) {
    state.m_w[l] = state.beta1 * state.m_w[l] + (1.0 - state.beta1) * grads.dw[l];
    state.v_w[l] = state.beta2 * state.v_w[l] +
                   (1.0 - state.beta2) * grads.dw[l].cwiseProduct(grads.dw[l]);
    net.weights[l].array() -=
        learning_rate * (state.m_w[l].array() / bc1) /
        ((state.v_w[l].array() / bc2).sqrt() + state.epsilon);

    state.m_b[l] = state.beta1 * state.m_b[l] + (1.0 - state.beta1) * grads.db[l];
    state.v_b[l] = state.beta2 * state.v_b[l] +
                   (1.0 - state.beta2) * grads.db[l].cwiseProduct(grads.db[l]);
    net.biases[l].array() -=
        learning_rate * (state.m_b[l].array() / bc1) /
        ((state.v_b[l].array() / bc2).sqrt() + state.epsilon);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("soft_update: tau must lie in (0, 1]");
  if (target.layer_sizes != online.layer_sizes)
    throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    target.weights[l] = (1.0 - tau) * target.weights[l] + tau * online.weights[l];
    target.biases[l] = (1.0 - tau) * target.biases[l] + tau * online.biases[l];
  }
}

std::uint64_t parameter_hash(const Mlp& net) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const double* data, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &data[i], sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffull;
        h *= 0x100000001b3ull;
      }
    }
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    mix(net.weights[l].data(), net.weights[l].size());
    mix(net.biases[l].data(), net.biases[l].size());
  }
  return h;
}

}  // namespace reachlab
