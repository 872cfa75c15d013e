#pragma once

#include <cstdint>

#include "vflsim/nn/model.hpp"
#include "vflsim/nn/optimizer.hpp"

namespace vflsim {

// Inverse-mapping network: intermediate features -> original party inputs.
struct InverNetConfig {
  int depth = 3;  // hidden layers: 3 -> (H,100,300,d), 2 -> (H,300,d), 1 -> (H,d)
  TrainHyper hyper{64, 4000, 1e-3, {}};
  std::uint64_t seed = 0;
};

// Throws ConfigError for depths outside 1..3.
ModelSpec invernet_spec(Index feature_width, Index target_width, int depth);

// Minibatch MSE regression from feature rows to input rows.  Pairs must align
// row for row.  Throws DivergenceError when the loss stops being finite.
Model train_invernet(const Matrix& features, const Matrix& inputs, const InverNetConfig& cfg);

// Raw reconstructions (decode_features turns them back into source cells).
Matrix reconstruct(const Model& invernet, const Matrix& features);

}  // namespace vflsim
