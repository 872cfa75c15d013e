#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vflsim/rng.hpp"
#include "vflsim/types.hpp"

namespace vflsim {

enum class Activation { None, ReLU };
enum class OutputActivation { None, Sigmoid, Softmax };
enum class Mode { Train, Eval };

// Fully connected feed-forward architecture.  layer_widths includes input and
// output, so {20, 300, 100, 100} is a 3-layer MLP taking 20 features.
struct ModelSpec {
  std::vector<Index> layer_widths;
  Activation hidden_activation = Activation::ReLU;
  OutputActivation output_activation = OutputActivation::None;

  Index num_layers() const { return static_cast<Index>(layer_widths.size()) - 1; }
  Index input_width() const { return layer_widths.front(); }
  Index output_width() const { return layer_widths.back(); }

  // Throws std::invalid_argument on fewer than two widths or a non-positive width.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

struct Model {
  ModelSpec spec;
  // weights[l] has shape (layer_widths[l+1] x layer_widths[l]); z = x * W^T + b.
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Mode mode = Mode::Train;

  Index parameter_count() const;
};

// Everything backward() needs from the corresponding forward() call.
struct Tape {
  std::vector<Matrix> layer_inputs;     // input to layer l, n x widths[l]
  std::vector<Matrix> pre_activations;  // z of layer l, n x widths[l+1]
  Matrix output;                        // post output-activation
};

struct Gradients {
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
  Matrix input_gradient;  // dL/d(input batch), same shape as the batch
};

// Xavier/Glorot uniform weights in ±sqrt(6/(fan_in+fan_out)), zero biases.
// Same spec + seed => bitwise identical model.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

// Runs the batch (n x input_width) through the model, recording a tape.
std::pair<Matrix, Tape> forward(const Model& model, const Matrix& batch);
// Forward without tape bookkeeping, for inference paths.
Matrix forward_eval(const Model& model, const Matrix& batch);

// Backpropagates dL/d(output) recorded against the given tape.  upstream must
// be the gradient w.r.t. the *post-activation* output unless the output
// activation is Sigmoid/Softmax paired with its matching loss, in which case
// loss_eval already folds the activation Jacobian in (see loss.hpp).
Gradients backward(const Model& model, const Tape& tape, const Matrix& upstream);

// FNV-1a over the parameter bytes; used to verify frozen components.
std::uint64_t parameter_hash(const Model& model);

}  // namespace vflsim
