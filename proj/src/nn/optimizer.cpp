#include "vflsim/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace vflsim {

OptimizerState make_optimizer_state(const Model& model) {
  OptimizerState s;
  for (const auto& w : model.weights) {
    s.m_w.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.v_w.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : model.biases) {
    s.m_b.push_back(Vector::Zero(b.size()));
    s.v_b.push_back(Vector::Zero(b.size()));
  }
  return s;
}

namespace {

template <typename Mat>
void adam_update(Mat& param, const Mat& grad, Mat& m, Mat& v, double lr, double bc1,
                 double bc2, const OptimizerConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square()).matrix();
  auto m_hat = m.array() / bc1;
  auto v_hat = v.array() / bc2;
  param.array() -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
}

}  // namespace

void optimizer_step(Model& model, const Gradients& grads, OptimizerState& state,
                    const TrainHyper& hyper) {
  std::size_t L = model.weights.size();
  if (grads.weight_grads.size() != L || grads.bias_grads.size() != L)
    throw std::invalid_argument("optimizer_step: gradient layer count mismatch");
  for (std::size_t l = 0; l < L; ++l) {
    if (grads.weight_grads[l].rows() != model.weights[l].rows() ||
        grads.weight_grads[l].cols() != model.weights[l].cols() ||
        grads.bias_grads[l].size() != model.biases[l].size())
      throw std::invalid_argument("optimizer_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
  }

  switch (hyper.optimizer.kind) {
    case OptimizerKind::SGD:
      for (std::size_t l = 0; l < L; ++l) {
        model.weights[l] -= hyper.learning_rate * grads.weight_grads[l];
        model.biases[l] -= hyper.learning_rate * grads.bias_grads[l];
      }
      ++state.step;
      break;
    case OptimizerKind::Adam: {
      ++state.step;
      const auto& cfg = hyper.optimizer;
      double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
      double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
      for (std::size_t l = 0; l < L; ++l) {
        adam_update(model.weights[l], grads.weight_grads[l], state.m_w[l], state.v_w[l],
                    hyper.learning_rate, bc1, bc2, cfg);
        adam_update(model.biases[l], grads.bias_grads[l], state.m_b[l], state.v_b[l],
                    hyper.learning_rate, bc1, bc2, cfg);
      }
      break;
    }
  }
}

}  // namespace vflsim
