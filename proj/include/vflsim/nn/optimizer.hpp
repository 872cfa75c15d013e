#pragma once

#include <cstdint>

#include "vflsim/nn/model.hpp"

namespace vflsim {

enum class OptimizerKind { SGD, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainHyper {
  Index batch_size = 64;
  Index iterations = 4000;  // minibatch steps, not epochs
  double learning_rate = 1e-3;
  OptimizerConfig optimizer;
};

// First/second moment accumulators, one slot per parameter tensor.
struct OptimizerState {
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;
  long step = 0;
};

OptimizerState make_optimizer_state(const Model& model);

// Applies one SGD or bias-corrected Adam update in place.
void optimizer_step(Model& model, const Gradients& grads, OptimizerState& state,
                    const TrainHyper& hyper);

}  // namespace vflsim
