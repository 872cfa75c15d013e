#include "vflsim/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace vflsim {

namespace {

constexpr double kProbFloor = 1e-12;

Matrix clamp_probs(Matrix p) {
  return p.array().min(1.0 - kProbFloor).max(kProbFloor).matrix();
}

void check_batch(const Model& model, const Matrix& batch) {
  if (batch.cols() != model.spec.input_width())
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols()) +
                                " columns, model expects " +
                                std::to_string(model.spec.input_width()));
}

}  // namespace

void ModelSpec::validate() const {
  if (layer_widths.size() < 2)
    throw std::invalid_argument("ModelSpec: need at least input and output widths");
  for (Index w : layer_widths)
    if (w <= 0) throw std::invalid_argument("ModelSpec: layer widths must be positive");
}

Index Model::parameter_count() const {
  Index n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Model model;
  model.spec = spec;
  RngStream rng(seed);
  for (Index l = 0; l < spec.num_layers(); ++l) {
    Index fan_in = spec.layer_widths[static_cast<std::size_t>(l)];
    Index fan_out = spec.layer_widths[static_cast<std::size_t>(l) + 1];
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    RngStream layer_rng = rng.split(static_cast<std::uint64_t>(l));
    model.weights.push_back(random_uniform(layer_rng, fan_out, fan_in, -bound, bound));
    model.biases.push_back(Vector::Zero(fan_out));
  }
  return model;
}

std::pair<Matrix, Tape> forward(const Model& model, const Matrix& batch) {
  check_batch(model, batch);
  Tape tape;
  Index L = model.spec.num_layers();
  tape.layer_inputs.reserve(static_cast<std::size_t>(L));
  tape.pre_activations.reserve(static_cast<std::size_t>(L));
  Matrix x = batch;
  for (Index l = 0; l < L; ++l) {
    tape.layer_inputs.push_back(x);
    const Matrix& W = model.weights[static_cast<std::size_t>(l)];
    const Vector& b = model.biases[static_cast<std::size_t>(l)];
    Matrix z = (x * W.transpose()).rowwise() + b.transpose();
    tape.pre_activations.push_back(z);
    if (l + 1 < L) {
      switch (model.spec.hidden_activation) {
        case Activation::None: x = z; break;
        case Activation::ReLU: x = z.cwiseMax(0.0); break;
      }
    } else {
      switch (model.spec.output_activation) {
        case OutputActivation::None:
          x = z;
          break;
        case OutputActivation::Sigmoid:
          x = clamp_probs((1.0 / (1.0 + (-z.array()).exp())).matrix());
          break;
        case OutputActivation::Softmax: {
          Matrix shifted = z.colwise() - z.rowwise().maxCoeff();
          Matrix e = shifted.array().exp().matrix();
          Vector sums = e.rowwise().sum();
          x = clamp_probs((e.array().colwise() / sums.array()).matrix());
          break;
        }
      }
    }
  }
  tape.output = x;
  return {x, tape};
}

Matrix forward_eval(const Model& model, const Matrix& batch) {
  return forward(model, batch).first;
}

Gradients backward(const Model& model, const Tape& tape, const Matrix& upstream) {
  Index L = model.spec.num_layers();
  if (static_cast<Index>(tape.layer_inputs.size()) != L ||
      static_cast<Index>(tape.pre_activations.size()) != L)
    throw std::invalid_argument("backward: tape does not match model depth");
  if (upstream.rows() != tape.output.rows() || upstream.cols() != tape.output.cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  for (Index l = 0; l < L; ++l) {
    if (tape.layer_inputs[static_cast<std::size_t>(l)].cols() !=
        model.spec.layer_widths[static_cast<std::size_t>(l)])
      throw std::invalid_argument("backward: tape widths do not match model spec");
  }

  Gradients grads;
  grads.weight_grads.resize(static_cast<std::size_t>(L));
  grads.bias_grads.resize(static_cast<std::size_t>(L));

  // Gradient w.r.t. the output layer's pre-activation.
  Matrix dz;
  switch (model.spec.output_activation) {
    case OutputActivation::None:
      dz = upstream;
      break;
    case OutputActivation::Sigmoid:
      dz = (upstream.array() * tape.output.array() * (1.0 - tape.output.array())).matrix();
      break;
    case OutputActivation::Softmax: {
      Vector dot = (upstream.array() * tape.output.array()).rowwise().sum();
      dz = (tape.output.array() * (upstream.array().colwise() - dot.array())).matrix();
      break;
    }
  }

  for (Index l = L - 1; l >= 0; --l) {
    const Matrix& x = tape.layer_inputs[static_cast<std::size_t>(l)];
    grads.weight_grads[static_cast<std::size_t>(l)] = dz.transpose() * x;
    grads.bias_grads[static_cast<std::size_t>(l)] = dz.colwise().sum().transpose();
    Matrix dx = dz * model.weights[static_cast<std::size_t>(l)];
    if (l > 0) {
      const Matrix& z_prev = tape.pre_activations[static_cast<std::size_t>(l) - 1];
      switch (model.spec.hidden_activation) {
        case Activation::None:
          dz = dx;
          break;
        case Activation::ReLU:
          dz = (dx.array() * (z_prev.array() > 0.0).cast<double>()).matrix();
          break;
      }
    } else {
      grads.input_gradient = dx;
    }
  }
  return grads;
}

std::uint64_t parameter_hash(const Model& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const double* data, Index n) {
    for (Index i = 0; i < n; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &data[i], sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffULL;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const auto& w : model.weights) feed(w.data(), w.size());
  for (const auto& b : model.biases) feed(b.data(), b.size());
  return h;
}

}  // namespace vflsim
