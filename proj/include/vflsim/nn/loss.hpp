#pragma once

#include "vflsim/types.hpp"

namespace vflsim {

enum class LossKind { MSE, BinaryCrossEntropy, CrossEntropy };

struct LossResult {
  double value = 0.0;
  Matrix gradient;  // dL/d(prediction), same shape as prediction
};

// MSE averages over every element (batch and feature dims).
// BinaryCrossEntropy expects an n x 1 prediction of probabilities and targets
// in {0,1}; CrossEntropy expects n x C probabilities against one-hot targets.
// Predictions are clamped to [1e-12, 1 - 1e-12] before the log, so the value
// stays finite for saturated outputs; the returned gradient is the gradient
// of the clamped loss.  Shape mismatches throw std::invalid_argument.
LossResult loss_eval(LossKind kind, const Matrix& prediction, const Matrix& target);

// {0..C-1} labels -> n x C one-hot rows (C = 1 column of {0,1} when classes == 2
// is *not* applied here; callers pick BCE vs CE themselves).
Matrix one_hot_labels(const std::vector<int>& labels, int classes);

}  // namespace vflsim
