#pragma once

#include <vector>

#include "vflsim/data/schema.hpp"
#include "vflsim/types.hpp"

namespace vflsim {

struct MetricConfig {
  // Continuous cell counts as recovered when |reconstructed - true| <= epsilon
  // on the encoded [-1, 1] scale.
  double epsilon = 0.2;
  // Peak-to-peak signal range for psnr/ssim (2.0 for [-1, 1] data).
  double data_range = 2.0;
};

// Percent of correctly recovered cells, overall and by column kind.  A kind
// with no columns reports NaN for its slot.
struct AccuracyTriple {
  double overall = 0.0;
  double discrete = 0.0;
  double continuous = 0.0;
};

// recon may be raw network output (any reals); truth must be a valid encoding.
// Categorical cells compare by per-group argmax, continuous cells by the
// epsilon band after clamping recon to [-1, 1].
AccuracyTriple reconstruction_accuracy(const Matrix& recon, const Matrix& truth,
                                       const Schema& schema, const MetricConfig& cfg = {});

// 10 log10(range^2 / mse); +inf when the tensors match exactly.
double psnr(const Matrix& recon, const Matrix& truth, double data_range = 2.0);

// Single-image SSIM.  Images smaller than 16x16 use one global window;
// larger ones average an 8x8 sliding window (stride 1, uniform weights).
double ssim_image(const Matrix& a, const Matrix& b, double data_range = 2.0);

// Mean SSIM over row-major flattened images stored one per row.
double mean_ssim(const Matrix& recon_rows, const Matrix& truth_rows, Index height,
                 Index width, double data_range = 2.0);

// Mann-Whitney AUC with midrank tie handling.  Throws std::invalid_argument
// when labels are single-class or sizes mismatch.
double roc_auc(const std::vector<int>& labels, const Vector& scores);

// Fraction correct; probabilities are n x 1 (threshold 0.5) or n x C (argmax).
double classification_accuracy(const std::vector<int>& labels, const Matrix& probabilities);

}  // namespace vflsim
