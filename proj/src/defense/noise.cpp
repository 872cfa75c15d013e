#include "vflsim/defense/noise.hpp"

#include <cmath>

namespace vflsim {

Matrix add_scaled_noise(const Matrix& tensor, double ratio, RngStream& rng) {
  if (ratio < 0.0) throw ConfigError("noise ratio must be non-negative");
  if (ratio == 0.0) return tensor;
  double mean = tensor.mean();
  double var = (tensor.array() - mean).square().sum() / static_cast<double>(tensor.size());
  double sd = std::max(std::sqrt(var), 1e-12);
  return tensor + random_normal(rng, tensor.rows(), tensor.cols(), 0.0, ratio * sd);
}

Matrix clip_rows(const Matrix& tensor, double max_norm) {
  if (max_norm < 0.0) throw ConfigError("clip norm must be non-negative");
  if (max_norm == 0.0) return tensor;
  Matrix out = tensor;
  for (Index r = 0; r < out.rows(); ++r) {
    double norm = out.row(r).norm();
    if (norm > max_norm) out.row(r) *= max_norm / norm;
  }
  return out;
}

std::string to_string(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::None: return "none";
    case DefenseKind::DpGradientNoise: return "dp_gradient";
    case DefenseKind::GaussianFeatureNoise: return "gaussian_feature";
  }
  return "none";
}

DefenseKind defense_kind_from_string(const std::string& name) {
  if (name == "none") return DefenseKind::None;
  if (name == "dp_gradient") return DefenseKind::DpGradientNoise;
  if (name == "gaussian_feature") return DefenseKind::GaussianFeatureNoise;
  throw ConfigError("unknown defense kind '" + name +
                    "' (expected none, dp_gradient or gaussian_feature)");
}

}  // namespace vflsim
