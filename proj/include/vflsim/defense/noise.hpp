#pragma once

#include <string>

#include "vflsim/rng.hpp"
#include "vflsim/types.hpp"

namespace vflsim {

enum class DefenseKind { None, DpGradientNoise, GaussianFeatureNoise };

struct DefenseConfig {
  DefenseKind kind = DefenseKind::None;
  // Noise std as a multiple of the perturbed tensor's own empirical std.
  double ratio = 0.0;
  // Optional per-row L2 norm cap applied before gradient noise; 0 disables.
  double clip = 0.0;
};

// Adds zero-mean Gaussian noise with std = ratio * std(tensor), where
// std(tensor) is the population std over all entries, floored at 1e-12.
// ratio == 0 returns the input bitwise-unchanged and draws nothing from rng;
// negative ratios throw ConfigError.
Matrix add_scaled_noise(const Matrix& tensor, double ratio, RngStream& rng);

// Rescales any row whose L2 norm exceeds max_norm down to exactly max_norm.
// max_norm == 0 returns the input unchanged; negative values throw ConfigError.
Matrix clip_rows(const Matrix& tensor, double max_norm);

std::string to_string(DefenseKind kind);
DefenseKind defense_kind_from_string(const std::string& name);

}  // namespace vflsim
