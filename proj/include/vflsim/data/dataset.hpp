#pragma once

#include <cstdint>
#include <vector>

#include "vflsim/data/schema.hpp"
#include "vflsim/types.hpp"

namespace vflsim {

// Source-space table: one column per schema column, categoricals stored as
// category indices.  row_ids trace rows back to the file they came from.
struct RawDataset {
  Schema schema;
  Matrix cells;
  std::vector<int> labels;  // class indices; empty when has_labels is false
  bool has_labels = false;
  std::vector<std::int64_t> row_ids;

  Index rows() const { return cells.rows(); }
};

// Model-space table: continuous columns scaled to [-1, 1], categoricals one-hot.
struct EncodedDataset {
  Schema schema;
  Matrix features;
  std::vector<int> labels;
  bool has_labels = false;
  std::vector<std::int64_t> row_ids;

  Index rows() const { return features.rows(); }
  Index width() const { return features.cols(); }
};

EncodedDataset encode(const RawDataset& raw);

// Inverse of encode for a feature matrix in the schema's encoded layout:
// one-hot groups collapse by argmax (lowest index wins ties), continuous
// values are clamped to [-1, 1] and mapped back to [min, max].
Matrix decode_features(const Matrix& features, const Schema& schema);

RawDataset decode(const EncodedDataset& data);

// Row subset in the given order; labels and row_ids follow.
EncodedDataset take_rows(const EncodedDataset& data, const std::vector<Index>& positions);

}  // namespace vflsim
