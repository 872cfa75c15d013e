#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vflsim {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Rows are samples, columns are features throughout.
using Matrix = MatX<double>;
using Vector = VecX<double>;
using Index = Eigen::Index;

// Thrown when a scenario touches state its capability set forbids
// (queries without query access, exceeding a query budget, ...).
struct CapabilityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when training produces a non-finite loss.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed configs / schemas / CLI input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vflsim
