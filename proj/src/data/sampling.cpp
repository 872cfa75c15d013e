#include "vflsim/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vflsim {

EncodedDataset sample_auxiliary(const EncodedDataset& pool, double ratio, RngStream rng) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw ConfigError("sample_auxiliary: ratio must lie in (0, 1], got " + std::to_string(ratio));
  if (pool.rows() == 0) throw ConfigError("sample_auxiliary: empty pool");
  Index n = std::max<Index>(
      1, static_cast<Index>(std::floor(ratio * static_cast<double>(pool.rows()))));
  std::vector<Index> picks = rng.sample_without_replacement(pool.rows(), n);
  return take_rows(pool, picks);
}

std::vector<Index> sample_leak_positions(const std::vector<Index>& positions, Index n,
                                         RngStream rng) {
  if (n <= 0 || n > static_cast<Index>(positions.size()))
    throw ConfigError("sample_leak_positions: need 1 <= n <= " +
                      std::to_string(positions.size()) + ", got " + std::to_string(n));
  std::vector<Index> picks = rng.sample_without_replacement(
      static_cast<Index>(positions.size()), n);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index p : picks) out.push_back(positions[static_cast<std::size_t>(p)]);
  return out;
}

EncodedDataset generate_fake(const Schema& schema, Index n, RngStream rng) {
  schema.validate();
  if (n <= 0) throw ConfigError("generate_fake: row count must be positive");
  EncodedDataset out;
  out.schema = schema;
  out.features = Matrix::Zero(n, schema.encoded_width());
  out.row_ids.reserve(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) out.row_ids.push_back(-1 - static_cast<std::int64_t>(r));
  Index off = 0;
  for (const Column& col : schema.columns) {
    if (col.kind == ColumnKind::Categorical) {
      Index k = col.encoded_size();
      for (Index r = 0; r < n; ++r) {
        Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k)));
        out.features(r, off + pick) = 1.0;
      }
      off += k;
    } else {
      for (Index r = 0; r < n; ++r) out.features(r, off) = rng.uniform(-1.0, 1.0);
      off += 1;
    }
  }
  return out;
}

EncodedDataset generate_uniform_noise(const Schema& schema, Index n, RngStream rng) {
  schema.validate();
  if (n <= 0) throw ConfigError("generate_uniform_noise: row count must be positive");
  EncodedDataset out;
  out.schema = schema;
  out.features = Matrix::Zero(n, schema.encoded_width());
  out.row_ids.reserve(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) out.row_ids.push_back(-1 - static_cast<std::int64_t>(r));
  Index off = 0;
  for (const Column& col : schema.columns) {
    Index k = col.encoded_size();
    for (Index j = 0; j < k; ++j) {
      double lo = col.kind == ColumnKind::Categorical ? 0.0 : -1.0;
      for (Index r = 0; r < n; ++r) out.features(r, off + j) = rng.uniform(lo, 1.0);
    }
    off += k;
  }
  return out;
}

}  // namespace vflsim
