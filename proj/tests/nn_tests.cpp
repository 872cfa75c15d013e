#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vflsim/nn/loss.hpp"
#include "vflsim/nn/model.hpp"
#include "vflsim/nn/optimizer.hpp"

using namespace vflsim;
using vflsim::testutil::FdCase;
using vflsim::testutil::fd_safe;
using vflsim::testutil::max_fd_error;

namespace {

ModelSpec mlp(std::vector<Index> widths, OutputActivation out = OutputActivation::None) {
  ModelSpec s;
  s.layer_widths = std::move(widths);
  s.hidden_activation = Activation::ReLU;
  s.output_activation = out;
  return s;
}

}  // namespace

TEST_CASE("init_model produces the documented shapes") {
  Model m = init_model(mlp({20, 300, 100, 100}), 7);
  REQUIRE(m.weights.size() == 3);
  CHECK(m.weights[0].rows() == 300);
  CHECK(m.weights[0].cols() == 20);
  CHECK(m.weights[1].rows() == 100);
  CHECK(m.weights[1].cols() == 300);
  CHECK(m.weights[2].rows() == 100);
  CHECK(m.weights[2].cols() == 100);
  for (const auto& b : m.biases) CHECK(b.isZero());
  double bound0 = std::sqrt(6.0 / (20 + 300));
  CHECK(m.weights[0].array().abs().maxCoeff() <= bound0);
}

TEST_CASE("init_model is bitwise deterministic per seed") {
  Model a = init_model(mlp({5, 8, 3}), 123);
  Model b = init_model(mlp({5, 8, 3}), 123);
  Model c = init_model(mlp({5, 8, 3}), 124);
  CHECK(parameter_hash(a) == parameter_hash(b));
  CHECK(parameter_hash(a) != parameter_hash(c));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(init_model(mlp({5}), 1), std::invalid_argument);
  CHECK_THROWS_AS(init_model(mlp({5, 0, 3}), 1), std::invalid_argument);
}

TEST_CASE("forward matches hand-computed affine values") {
  Model m = init_model(mlp({1, 1}), 0);
  m.weights[0](0, 0) = 2.0;
  m.biases[0](0) = 3.0;
  Matrix x(1, 1);
  x << 1.0;
  CHECK(forward_eval(m, x)(0, 0) == doctest::Approx(5.0));

  // identity weights pass the batch through untouched
  ModelSpec ident = mlp({3, 3});
  ident.hidden_activation = Activation::None;
  Model id_model = init_model(ident, 0);
  id_model.weights[0] = Matrix::Identity(3, 3);
  RngStream rng(4);
  Matrix batch = random_normal(rng, 5, 3, 0.0, 1.0);
  CHECK((forward_eval(id_model, batch) - batch).norm() == 0.0);
}

TEST_CASE("relu clips negatives in hidden layers") {
  Model m = init_model(mlp({2, 2, 2}), 0);
  m.weights[0] = Matrix::Identity(2, 2);
  m.weights[1] = Matrix::Identity(2, 2);
  Matrix x(1, 2);
  x << -1.0, 2.0;
  Matrix y = forward_eval(m, x);
  CHECK(y(0, 0) == doctest::Approx(0.0));
  CHECK(y(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("forward rejects wrong batch width") {
  Model m = init_model(mlp({4, 2}), 9);
  CHECK_THROWS_AS((void)forward_eval(m, Matrix::Zero(3, 5)), std::invalid_argument);
}

TEST_CASE("sigmoid and softmax outputs are valid probabilities") {
  Model m = init_model(mlp({3, 4, 1}, OutputActivation::Sigmoid), 2);
  RngStream rng(6);
  Matrix x = random_normal(rng, 10, 3, 0.0, 2.0);
  Matrix p = forward_eval(m, x);
  CHECK(p.minCoeff() > 0.0);
  CHECK(p.maxCoeff() < 1.0);

  Model sm = init_model(mlp({3, 4, 5}, OutputActivation::Softmax), 2);
  Matrix q = forward_eval(sm, x);
  for (Index i = 0; i < q.rows(); ++i)
    CHECK(q.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("backward reproduces a hand-worked single layer") {
  // y = x W^T, L implicit with upstream U: dW = U^T x, dx = U W.
  Model m = init_model(mlp({2, 2}), 0);
  m.weights[0] << 1.0, 2.0, 3.0, 4.0;
  Matrix x(1, 2);
  x << 5.0, 6.0;
  auto [y, tape] = forward(m, x);
  Matrix up(1, 2);
  up << 1.0, -1.0;
  Gradients g = backward(m, tape, up);
  CHECK(g.weight_grads[0](0, 0) == doctest::Approx(5.0));
  CHECK(g.weight_grads[0](0, 1) == doctest::Approx(6.0));
  CHECK(g.weight_grads[0](1, 0) == doctest::Approx(-5.0));
  CHECK(g.weight_grads[0](1, 1) == doctest::Approx(-6.0));
  // dx = U W = (1,-1) * [[1,2],[3,4]] = (-2,-2)
  CHECK(g.input_gradient(0, 0) == doctest::Approx(-2.0));
  CHECK(g.input_gradient(0, 1) == doctest::Approx(-2.0));
  CHECK(g.bias_grads[0](0) == doctest::Approx(1.0));
  CHECK(g.bias_grads[0](1) == doctest::Approx(-1.0));
}

TEST_CASE("backward rejects a tape from a different architecture") {
  Model a = init_model(mlp({3, 4, 2}), 1);
  Model b = init_model(mlp({3, 2}), 1);
  auto [y, tape] = forward(a, Matrix::Zero(2, 3));
  CHECK_THROWS_AS((void)backward(b, tape, Matrix::Zero(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS((void)backward(a, tape, Matrix::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("zero upstream gives zero gradients") {
  Model m = init_model(mlp({4, 6, 3}), 3);
  RngStream rng(8);
  Matrix x = random_normal(rng, 7, 4, 0.0, 1.0);
  auto [y, tape] = forward(m, x);
  Gradients g = backward(m, tape, Matrix::Zero(7, 3));
  for (const auto& wg : g.weight_grads) CHECK(wg.isZero());
  CHECK(g.input_gradient.isZero());
}

TEST_CASE("analytic gradients match central finite differences") {
  RngStream rng(2024);
  int done = 0;
  double worst = 0.0;
  while (done < 12) {
    Index in = 2 + static_cast<Index>(rng.below(4));
    Index hid = 3 + static_cast<Index>(rng.below(5));
    int variant = done % 3;
    FdCase c;
    if (variant == 0) {
      c.model = init_model(mlp({in, hid, 3}), rng.next_u64());
      c.loss = LossKind::MSE;
    } else if (variant == 1) {
      c.model = init_model(mlp({in, hid, 1}, OutputActivation::Sigmoid), rng.next_u64());
      c.loss = LossKind::BinaryCrossEntropy;
    } else {
      c.model = init_model(mlp({in, hid, 4}, OutputActivation::Softmax), rng.next_u64());
      c.loss = LossKind::CrossEntropy;
    }
    c.batch = random_normal(rng, 6, in, 0.0, 1.0);
    if (!fd_safe(c.model, c.batch)) continue;
    Index out_w = c.model.spec.output_width();
    if (c.loss == LossKind::MSE) {
      c.target = random_normal(rng, 6, out_w, 0.0, 1.0);
    } else if (c.loss == LossKind::BinaryCrossEntropy) {
      c.target = Matrix::Zero(6, 1);
      for (Index i = 0; i < 6; ++i) c.target(i, 0) = static_cast<double>(rng.below(2));
    } else {
      std::vector<int> labels;
      for (Index i = 0; i < 6; ++i) labels.push_back(static_cast<int>(rng.below(4)));
      c.target = one_hot_labels(labels, 4);
    }
    worst = std::max(worst, max_fd_error(c, rng, 10));
    ++done;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("loss values match closed forms") {
  Matrix p(2, 1), y(2, 1);
  p << 0.5, 0.5;
  y << 1.0, 0.0;
  LossResult bce = loss_eval(LossKind::BinaryCrossEntropy, p, y);
  CHECK(bce.value == doctest::Approx(std::log(2.0)));

  Matrix a(2, 2), b(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  b = a;
  CHECK(loss_eval(LossKind::MSE, a, b).value == doctest::Approx(0.0));
  b(0, 0) = 3.0;  // one element off by 2 over 4 elements -> 4/4
  CHECK(loss_eval(LossKind::MSE, a, b).value == doctest::Approx(1.0));

  Matrix q(1, 3), t(1, 3);
  q << 0.2, 0.5, 0.3;
  t << 0.0, 1.0, 0.0;
  CHECK(loss_eval(LossKind::CrossEntropy, q, t).value == doctest::Approx(-std::log(0.5)));
}

TEST_CASE("loss_eval rejects shape mismatches") {
  CHECK_THROWS_AS((void)loss_eval(LossKind::MSE, Matrix::Zero(2, 2), Matrix::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)loss_eval(LossKind::BinaryCrossEntropy, Matrix::Zero(2, 2), Matrix::Zero(2, 2)),
      std::invalid_argument);
  CHECK_THROWS_AS((void)loss_eval(LossKind::MSE, Matrix(), Matrix()), std::invalid_argument);
}

TEST_CASE("mse is symmetric and non-negative") {
  RngStream rng(77);
  for (int t = 0; t < 20; ++t) {
    Matrix a = random_normal(rng, 4, 3, 0.0, 2.0);
    Matrix b = random_normal(rng, 4, 3, 0.0, 2.0);
    double ab = loss_eval(LossKind::MSE, a, b).value;
    double ba = loss_eval(LossKind::MSE, b, a).value;
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("one_hot_labels builds unit rows") {
  Matrix oh = one_hot_labels({0, 2, 1}, 3);
  CHECK(oh(0, 0) == 1.0);
  CHECK(oh(1, 2) == 1.0);
  CHECK(oh(2, 1) == 1.0);
  CHECK(oh.sum() == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)one_hot_labels({3}, 3), std::invalid_argument);
}

TEST_CASE("sgd applies the textbook update") {
  Model m = init_model(mlp({1, 1}), 0);
  m.weights[0](0, 0) = 1.0;
  m.biases[0](0) = 0.0;
  Gradients g;
  g.weight_grads = {Matrix::Constant(1, 1, 0.5)};
  g.bias_grads = {Vector::Constant(1, 0.25)};
  OptimizerState st = make_optimizer_state(m);
  TrainHyper hy;
  hy.learning_rate = 0.1;
  hy.optimizer.kind = OptimizerKind::SGD;
  optimizer_step(m, g, st, hy);
  CHECK(m.weights[0](0, 0) == doctest::Approx(0.95));
  CHECK(m.biases[0](0) == doctest::Approx(-0.025));
}

TEST_CASE("adam first step moves by about the learning rate") {
  Model m = init_model(mlp({1, 1}), 0);
  m.weights[0](0, 0) = 1.0;
  Gradients g;
  g.weight_grads = {Matrix::Constant(1, 1, 2.0)};
  g.bias_grads = {Vector::Zero(1)};
  OptimizerState st = make_optimizer_state(m);
  TrainHyper hy;
  hy.learning_rate = 0.1;
  hy.optimizer.kind = OptimizerKind::Adam;
  optimizer_step(m, g, st, hy);
  // m_hat = 2, v_hat = 4 -> step = lr * 2 / (2 + eps)
  CHECK(m.weights[0](0, 0) == doctest::Approx(1.0 - 0.1 * 2.0 / (2.0 + 1e-8)));
  CHECK(st.step == 1);
}

TEST_CASE("zero gradients leave parameters fixed under both optimizers") {
  for (OptimizerKind kind : {OptimizerKind::SGD, OptimizerKind::Adam}) {
    Model m = init_model(mlp({3, 4, 2}), 5);
    std::uint64_t before = parameter_hash(m);
    Gradients g;
    for (const auto& w : m.weights) g.weight_grads.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : m.biases) g.bias_grads.push_back(Vector::Zero(b.size()));
    OptimizerState st = make_optimizer_state(m);
    TrainHyper hy;
    hy.optimizer.kind = kind;
    for (int i = 0; i < 3; ++i) optimizer_step(m, g, st, hy);
    CHECK(parameter_hash(m) == before);
  }
}

TEST_CASE("learning rate zero is an identity update") {
  Model m = init_model(mlp({2, 3, 1}), 8);
  std::uint64_t before = parameter_hash(m);
  RngStream rng(9);
  Matrix x = random_normal(rng, 4, 2, 0.0, 1.0);
  auto [y, tape] = forward(m, x);
  Gradients g = backward(m, tape, Matrix::Ones(4, 1));
  OptimizerState st = make_optimizer_state(m);
  TrainHyper hy;
  hy.learning_rate = 0.0;
  hy.optimizer.kind = OptimizerKind::SGD;
  optimizer_step(m, g, st, hy);
  CHECK(parameter_hash(m) == before);
}

TEST_CASE("optimizer_step validates gradient shapes") {
  Model m = init_model(mlp({2, 3}), 1);
  Gradients g;
  g.weight_grads = {Matrix::Zero(3, 3)};
  g.bias_grads = {Vector::Zero(3)};
  OptimizerState st = make_optimizer_state(m);
  TrainHyper hy;
  CHECK_THROWS_AS(optimizer_step(m, g, st, hy), std::invalid_argument);
}

TEST_CASE("train and eval modes compute identical outputs") {
  Model m = init_model(mlp({4, 8, 2}, OutputActivation::Sigmoid), 21);
  RngStream rng(22);
  Matrix x = random_normal(rng, 6, 4, 0.0, 1.0);
  m.mode = Mode::Train;
  Matrix a = forward_eval(m, x);
  m.mode = Mode::Eval;
  Matrix b = forward_eval(m, x);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("a few sgd steps reduce a convex loss") {
  // fit y = 2x on one layer, no activation
  Model m = init_model(mlp({1, 1}), 13);
  RngStream rng(14);
  Matrix x = random_normal(rng, 32, 1, 0.0, 1.0);
  Matrix y = 2.0 * x;
  OptimizerState st = make_optimizer_state(m);
  TrainHyper hy;
  hy.learning_rate = 0.05;
  hy.optimizer.kind = OptimizerKind::SGD;
  double first = -1.0, last = -1.0;
  for (int i = 0; i < 200; ++i) {
    auto [out, tape] = forward(m, x);
    LossResult lr = loss_eval(LossKind::MSE, out, y);
    if (i == 0) first = lr.value;
    last = lr.value;
    Gradients g = backward(m, tape, lr.gradient);
    optimizer_step(m, g, st, hy);
  }
  CHECK(last < first * 0.01);
}
