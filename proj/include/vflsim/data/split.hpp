#pragma once

#include <vector>

#include "vflsim/data/dataset.hpp"
#include "vflsim/rng.hpp"

namespace vflsim {

// Shuffled row partition; train gets floor(train_fraction * n) rows.
struct RowSplit {
  std::vector<Index> train;
  std::vector<Index> holdout;
};

// train_fraction must land strictly between 0 and 1 and leave both sides
// non-empty, otherwise ConfigError.
RowSplit split_rows(Index n, double train_fraction, RngStream rng);

// Which source columns each party holds.  Party 0 is the active party.
struct FeatureAssignment {
  std::vector<std::vector<Index>> party_columns;

  int parties() const { return static_cast<int>(party_columns.size()); }
  // Partition check: every schema column appears exactly once, no party empty.
  void validate(const Schema& schema) const;
};

// Contiguous per-kind blocks: each party receives a block of the categorical
// columns and a block of the continuous columns, in schema order.
FeatureAssignment equal_split(const Schema& schema, int parties);

// Two or more parties; the last party (the attack target) takes the trailing
// floor(ratio * n_categorical) + floor(ratio * n_continuous) columns, the rest
// is divided equally among the leading parties.
FeatureAssignment ratio_split(const Schema& schema, double target_ratio, int parties = 2);

// Per-party encoded views.  One-hot groups never split across parties because
// assignment is by source column.  Views drop labels; row_ids are preserved.
std::vector<EncodedDataset> vertical_split(const EncodedDataset& data,
                                           const FeatureAssignment& assignment);

// Stitches per-party views back into the original column order.
EncodedDataset reassemble(const std::vector<EncodedDataset>& views,
                          const FeatureAssignment& assignment, const Schema& full_schema);

}  // namespace vflsim
