#include "vflsim/data/dataset.hpp"

#include <cmath>
#include <string>

namespace vflsim {

EncodedDataset encode(const RawDataset& raw) {
  raw.schema.validate();
  const Schema& s = raw.schema;
  if (raw.cells.cols() != s.num_columns())
    throw std::invalid_argument("encode: cell matrix has " + std::to_string(raw.cells.cols()) +
                                " columns, schema has " + std::to_string(s.num_columns()));
  EncodedDataset out;
  out.schema = s;
  out.labels = raw.labels;
  out.has_labels = raw.has_labels;
  out.row_ids = raw.row_ids;
  out.features = Matrix::Zero(raw.rows(), s.encoded_width());

  Index off = 0;
  for (Index c = 0; c < s.num_columns(); ++c) {
    const Column& col = s.columns[static_cast<std::size_t>(c)];
    if (col.kind == ColumnKind::Categorical) {
      Index k = col.encoded_size();
      for (Index r = 0; r < raw.rows(); ++r) {
        double v = raw.cells(r, c);
        Index idx = static_cast<Index>(v);
        if (v != std::floor(v) || idx < 0 || idx >= k)
          throw std::invalid_argument("encode: row " + std::to_string(r) + ", column '" +
                                      col.name + "': bad category index " + std::to_string(v));
        out.features(r, off + idx) = 1.0;
      }
      off += k;
    } else {
      double span = col.max - col.min;
      for (Index r = 0; r < raw.rows(); ++r) {
        double v = raw.cells(r, c);
        if (v < col.min || v > col.max)
          throw std::invalid_argument("encode: row " + std::to_string(r) + ", column '" +
                                      col.name + "': value " + std::to_string(v) +
                                      " outside [" + std::to_string(col.min) + ", " +
                                      std::to_string(col.max) + "]");
        out.features(r, off) = span > 0.0 ? 2.0 * (v - col.min) / span - 1.0 : 0.0;
      }
      off += 1;
    }
  }
  return out;
}

Matrix decode_features(const Matrix& features, const Schema& schema) {
  if (features.cols() != schema.encoded_width())
    throw std::invalid_argument("decode_features: expected width " +
                                std::to_string(schema.encoded_width()) + ", got " +
                                std::to_string(features.cols()));
  Matrix out(features.rows(), schema.num_columns());
  Index off = 0;
  for (Index c = 0; c < schema.num_columns(); ++c) {
    const Column& col = schema.columns[static_cast<std::size_t>(c)];
    if (col.kind == ColumnKind::Categorical) {
      Index k = col.encoded_size();
      for (Index r = 0; r < features.rows(); ++r) {
        Index best = 0;
        double best_v = features(r, off);
        for (Index j = 1; j < k; ++j) {
          if (features(r, off + j) > best_v) {  // strict: ties keep the lowest index
            best_v = features(r, off + j);
            best = j;
          }
        }
        out(r, c) = static_cast<double>(best);
      }
      off += k;
    } else {
      for (Index r = 0; r < features.rows(); ++r) {
        double v = std::clamp(features(r, off), -1.0, 1.0);
        out(r, c) = col.min + (v + 1.0) * 0.5 * (col.max - col.min);
      }
      off += 1;
    }
  }
  return out;
}

RawDataset decode(const EncodedDataset& data) {
  RawDataset out;
  out.schema = data.schema;
  out.labels = data.labels;
  out.has_labels = data.has_labels;
  out.row_ids = data.row_ids;
  out.cells = decode_features(data.features, data.schema);
  return out;
}

EncodedDataset take_rows(const EncodedDataset& data, const std::vector<Index>& positions) {
  EncodedDataset out;
  out.schema = data.schema;
  out.has_labels = data.has_labels;
  out.features = Matrix(static_cast<Index>(positions.size()), data.width());
  out.row_ids.reserve(positions.size());
  if (data.has_labels) out.labels.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Index p = positions[i];
    if (p < 0 || p >= data.rows())
      throw std::invalid_argument("take_rows: position " + std::to_string(p) + " out of range");
    out.features.row(static_cast<Index>(i)) = data.features.row(p);
    out.row_ids.push_back(data.row_ids[static_cast<std::size_t>(p)]);
    if (data.has_labels) out.labels.push_back(data.labels[static_cast<std::size_t>(p)]);
  }
  return out;
}

}  // namespace vflsim
