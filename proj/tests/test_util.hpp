#pragma once

#include <cmath>
#include <functional>

#include "vflsim/nn/loss.hpp"
#include "vflsim/nn/model.hpp"
#include "vflsim/rng.hpp"

namespace vflsim::testutil {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Central finite difference of a scalar function at x.
inline double fd(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct FdCase {
  Model model;
  Matrix batch;
  Matrix target;
  LossKind loss;
};

inline double loss_of(const FdCase& c, const Model& m, const Matrix& batch) {
  return loss_eval(c.loss, forward_eval(m, batch), c.target).value;
}

// Largest relative error between analytic and finite-difference gradients over
// `trials` randomly chosen parameter coordinates plus `trials` input coordinates.
inline double max_fd_error(const FdCase& c, RngStream& rng, int trials) {
  auto [out, tape] = forward(c.model, c.batch);
  LossResult lr = loss_eval(c.loss, out, c.target);
  Gradients g = backward(c.model, tape, lr.gradient);

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::size_t l = static_cast<std::size_t>(rng.below(c.model.weights.size()));
    Matrix& W = const_cast<Model&>(c.model).weights[l];
    Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(W.rows())));
    Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(W.cols())));
    double saved = W(i, j);
    double num = fd(
        [&](double v) {
          W(i, j) = v;
          double L = loss_of(c, c.model, c.batch);
          W(i, j) = saved;
          return L;
        },
        saved);
    worst = std::max(worst, rel_err(num, g.weight_grads[l](i, j)));

    Matrix& batch = const_cast<Matrix&>(c.batch);
    Index r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(batch.rows())));
    Index f = static_cast<Index>(rng.below(static_cast<std::uint64_t>(batch.cols())));
    double sx = batch(r, f);
    double num_in = fd(
        [&](double v) {
          batch(r, f) = v;
          double L = loss_of(c, c.model, batch);
          batch(r, f) = sx;
          return L;
        },
        sx);
    worst = std::max(worst, rel_err(num_in, g.input_gradient(r, f)));
  }
  return worst;
}

// True when no ReLU pre-activation sits close enough to its kink for a finite
// difference step to cross it, and no output is saturated.
inline bool fd_safe(const Model& model, const Matrix& batch) {
  auto [out, tape] = forward(model, batch);
  if (model.spec.hidden_activation == Activation::ReLU) {
    std::size_t hidden = tape.pre_activations.size() - 1;
    for (std::size_t l = 0; l < hidden; ++l)
      if (tape.pre_activations[l].array().abs().minCoeff() < 1e-4) return false;
  }
  if (model.spec.output_activation != OutputActivation::None) {
    if (out.array().minCoeff() < 1e-6 || out.array().maxCoeff() > 1.0 - 1e-6) return false;
  }
  return true;
}

}  // namespace vflsim::testutil
