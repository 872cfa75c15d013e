#include "vflsim/nn/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace vflsim {

namespace {
constexpr double kProbFloor = 1e-12;

void check_shapes(const Matrix& prediction, const Matrix& target, const char* what) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
    throw std::invalid_argument(std::string(what) + ": prediction " +
                                std::to_string(prediction.rows()) + "x" +
                                std::to_string(prediction.cols()) + " vs target " +
                                std::to_string(target.rows()) + "x" +
                                std::to_string(target.cols()));
  if (prediction.rows() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
}
}  // namespace

LossResult loss_eval(LossKind kind, const Matrix& prediction, const Matrix& target) {
  LossResult out;
  switch (kind) {
    case LossKind::MSE: {
      check_shapes(prediction, target, "mse");
      double n = static_cast<double>(prediction.size());
      Matrix diff = prediction - target;
      out.value = diff.squaredNorm() / n;
      out.gradient = (2.0 / n) * diff;
      break;
    }
    case LossKind::BinaryCrossEntropy: {
      check_shapes(prediction, target, "bce");
      if (prediction.cols() != 1)
        throw std::invalid_argument("bce: expects a single probability column");
      double n = static_cast<double>(prediction.rows());
      Eigen::ArrayXXd p = prediction.array().min(1.0 - kProbFloor).max(kProbFloor);
      Eigen::ArrayXXd y = target.array();
      out.value = -((y * p.log()) + (1.0 - y) * (1.0 - p).log()).sum() / n;
      out.gradient = ((p - y) / (p * (1.0 - p)) / n).matrix();
      break;
    }
    case LossKind::CrossEntropy: {
      check_shapes(prediction, target, "cross_entropy");
      double n = static_cast<double>(prediction.rows());
      Eigen::ArrayXXd p = prediction.array().min(1.0 - kProbFloor).max(kProbFloor);
      Eigen::ArrayXXd y = target.array();
      out.value = -(y * p.log()).sum() / n;
      out.gradient = (-(y / p) / n).matrix();
      break;
    }
  }
  return out;
}

Matrix one_hot_labels(const std::vector<int>& labels, int classes) {
  if (classes < 2) throw std::invalid_argument("one_hot_labels: need at least 2 classes");
  Matrix out = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      throw std::invalid_argument("one_hot_labels: label " + std::to_string(labels[i]) +
                                  " out of range at row " + std::to_string(i));
    out(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return out;
}

}  // namespace vflsim
