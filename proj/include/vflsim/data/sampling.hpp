#pragma once

#include <cstdint>
#include <vector>

#include "vflsim/data/dataset.hpp"
#include "vflsim/rng.hpp"

namespace vflsim {

// floor(ratio * pool) rows drawn without replacement; ratio in (0, 1], and the
// result must be non-empty, otherwise ConfigError.
EncodedDataset sample_auxiliary(const EncodedDataset& pool, double ratio, RngStream rng);

// n unique picks from `positions` (n == positions.size() allowed).
std::vector<Index> sample_leak_positions(const std::vector<Index>& positions, Index n,
                                         RngStream rng);

// Schema-guided fake rows: each categorical column gets a uniformly random
// category (proper one-hot), each continuous column a uniform draw in [-1, 1].
// n must be positive.  Synthetic rows carry negative row_ids.
EncodedDataset generate_fake(const Schema& schema, Index n, RngStream rng);

// Structure-free baseline: every encoded column sampled independently,
// U[0,1] on one-hot columns, U[-1,1] on continuous ones.
EncodedDataset generate_uniform_noise(const Schema& schema, Index n, RngStream rng);

// Leaked training rows: the target-party inputs and their captured
// intermediate features, aligned row for row.
struct LeakSet {
  std::vector<Index> positions;  // into the session's row space
  std::vector<std::int64_t> row_ids;
  Matrix encoded_rows;  // target-party view x
  Matrix features;      // captured H for the same rows
};

}  // namespace vflsim
