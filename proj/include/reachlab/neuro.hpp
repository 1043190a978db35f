#pragma once

#include <string>
#include <vector>

#include "reachlab/rng.hpp"
#include "reachlab/types.hpp"

namespace reachlab {

enum class Activation { relu, tanh };
enum class OutputActivation { linear, tanh };

const char* to_string(Activation a);
const char* to_string(OutputActivation a);
Activation activation_from_string(const std::string& s);
OutputActivation output_activation_from_string(const std::string& s);

// Fully connected network. weights[l] is (layer_sizes[l+1] x layer_sizes[l]);
// inputs and activations are column-batched so training updates run as gemms.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<MatX> weights;
  std::vector<VecX> biases;
  std::vector<Activation> hidden_activations;  // one per hidden layer
  OutputActivation output_activation = OutputActivation::linear;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
  void check_shapes() const;
};

// Uniform fan-in init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and
// biases; final_layer_scale shrinks the output layer (near-zero initial policy).
Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             OutputActivation output, Rng& rng, double final_layer_scale = 1.0);

// Cached activations from a forward pass, sufficient for exact backprop.
struct Tape {
  MatX input;
  std::vector<MatX> pre;   // pre-activation per layer
  std::vector<MatX> post;  // post-activation per layer; post.back() is the output
};

MatX mlp_forward(const Mlp& net, const MatX& input, Tape* tape = nullptr);
VecX mlp_forward(const Mlp& net, const VecX& input);

struct MlpGrads {
  std::vector<MatX> dw;
  std::vector<VecX> db;
};

MlpGrads zero_grads(const Mlp& net);

// Reverse-mode gradients of the scalar whose d(scalar)/d(output) columns are
// supplied; returns d(scalar)/d(input). Parameter gradients are accumulated
// over the batch into `grads`.
MatX mlp_backward(const Mlp& net, const Tape& tape, const MatX& output_gradient,
                  MlpGrads& grads);

struct AdamState {
  std::vector<MatX> m_w, v_w;
  std::vector<VecX> m_b, v_b;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const Mlp& net);

// Bias-corrected Adam. Non-finite gradients are rejected with an exception so
// a diverging run can be flagged instead of silently poisoning parameters.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double learning_rate);

// target <- (1 - tau) * target + tau * online
void soft_update(Mlp& target, const Mlp& online, double tau);

// FNV-1a over the raw parameter bytes; used to assert evaluation never
// mutates an agent.
std::uint64_t parameter_hash(const Mlp& net);

}  // namespace reachlab
