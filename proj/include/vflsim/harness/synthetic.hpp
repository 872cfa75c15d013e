#pragma once

#include <cstdint>
#include <string>

#include "vflsim/data/dataset.hpp"

namespace vflsim {

// Built-in generated stand-ins for the three tabular benchmarks, usable when
// the real CSV files are absent.  Rows are drawn from a low-rank latent factor
// model: every column is a noisy projection of a shared latent vector, so
// columns are mutually informative (what feature-reconstruction attacks rely
// on), and labels are a noisy logistic readout of the same latents.  Like the
// real benchmarks after min-max scaling, categorical marginals are skewed
// toward one dominant level and continuous mass concentrates well inside the
// encoded range.
//
// Per-name texture (column counts mirror the real datasets):
//   bank-like:   10 categorical + 10 continuous, skewed positives; strongly
//                dominant category levels, tight central continuous bands.
//   income-like: 8 categorical + 6 continuous, milder skew, wider continuous
//                spread, and a strong label signal.
//   credit-like: 9 categorical + 14 continuous, near-degenerate categorical
//                marginals and bimodal continuous columns (two tight clusters
//                away from zero, one far likelier than the other).
EncodedDataset make_synthetic_tabular(const std::string& name, Index rows,
                                      std::uint64_t seed);

bool is_synthetic_tabular_name(const std::string& name);

// Grayscale random-rectangle images with Gaussian texture, side in [8, 32],
// flattened pixel-column-major so a trailing-column feature split hands party
// 1 exactly the right half of every image.  Values lie in [-1, 1]; the label
// says whether the rectangle's center falls in the right half.
EncodedDataset make_synthetic_image_dataset(Index side, Index n, std::uint64_t seed);

}  // namespace vflsim
