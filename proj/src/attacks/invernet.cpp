#include "vflsim/attacks/invernet.hpp"

#include <cmath>
#include <string>

#include "vflsim/nn/loss.hpp"
#include "vflsim/rng.hpp"

namespace vflsim {

ModelSpec invernet_spec(Index feature_width, Index target_width, int depth) {
  if (feature_width <= 0 || target_width <= 0)
    throw ConfigError("invernet_spec: widths must be positive");
  ModelSpec spec;
  spec.layer_widths.push_back(feature_width);
  switch (depth) {
    case 1: break;
    case 2: spec.layer_widths.push_back(300); break;
    case 3:
      spec.layer_widths.push_back(100);
      spec.layer_widths.push_back(300);
      break;
    default:
      throw ConfigError("invernet_spec: depth must be 1, 2 or 3, got " +
                        std::to_string(depth));
  }
  spec.layer_widths.push_back(target_width);
  spec.hidden_activation = Activation::ReLU;
  spec.output_activation = OutputActivation::None;
  return spec;
}

Model train_invernet(const Matrix& features, const Matrix& inputs,
                     const InverNetConfig& cfg) {
  if (features.rows() != inputs.rows())
    throw ConfigError("train_invernet: feature/input row mismatch");
  if (features.rows() == 0) throw ConfigError("train_invernet: no training pairs");

  Model net = init_model(invernet_spec(features.cols(), inputs.cols(), cfg.depth), cfg.seed);
  OptimizerState opt = make_optimizer_state(net);
  RngStream rng = RngStream(cfg.seed).split("batches");

  Index n = features.rows();
  Index batch = std::min(cfg.hyper.batch_size, n);
  for (Index it = 0; it < cfg.hyper.iterations; ++it) {
    std::vector<Index> picks = rng.sample_without_replacement(n, batch);
    Matrix h(batch, features.cols());
    Matrix x(batch, inputs.cols());
    for (Index i = 0; i < batch; ++i) {
      h.row(i) = features.row(picks[static_cast<std::size_t>(i)]);
      x.row(i) = inputs.row(picks[static_cast<std::size_t>(i)]);
    }
    auto [out, tape] = forward(net, h);
    LossResult lr = loss_eval(LossKind::MSE, out, x);
    if (!std::isfinite(lr.value))
      throw DivergenceError("invernet training diverged at iteration " + std::to_string(it));
    Gradients g = backward(net, tape, lr.gradient);
    optimizer_step(net, g, opt, cfg.hyper);
  }
  return net;
}

Matrix reconstruct(const Model& invernet, const Matrix& features) {
  return forward_eval(invernet, features);
}

}  // namespace vflsim
