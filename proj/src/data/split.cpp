#include "vflsim/data/split.hpp"

#include <cmath>
#include <set>
#include <string>

namespace vflsim {

RowSplit split_rows(Index n, double train_fraction, RngStream rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split_rows: train fraction must lie strictly between 0 and 1, got " +
                      std::to_string(train_fraction));
  Index train_n = static_cast<Index>(std::floor(train_fraction * static_cast<double>(n)));
  if (train_n == 0 || train_n == n)
    throw ConfigError("split_rows: fraction " + std::to_string(train_fraction) +
                      " leaves an empty side for n=" + std::to_string(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  RowSplit out;
  out.train.assign(order.begin(), order.begin() + train_n);
  out.holdout.assign(order.begin() + train_n, order.end());
  return out;
}

void FeatureAssignment::validate(const Schema& schema) const {
  if (party_columns.size() < 2)
    throw ConfigError("feature assignment: need at least 2 parties");
  std::set<Index> seen;
  for (std::size_t p = 0; p < party_columns.size(); ++p) {
    if (party_columns[p].empty())
      throw ConfigError("feature assignment: party " + std::to_string(p) + " holds no columns");
    for (Index c : party_columns[p]) {
      if (c < 0 || c >= schema.num_columns())
        throw ConfigError("feature assignment: column index " + std::to_string(c) +
                          " out of range");
      if (!seen.insert(c).second)
        throw ConfigError("feature assignment: column " + std::to_string(c) +
                          " assigned twice");
    }
  }
  if (static_cast<Index>(seen.size()) != schema.num_columns())
    throw ConfigError("feature assignment: not all columns assigned");
}

namespace {

// Splits `cols` into `parties` contiguous chunks (earlier chunks get the
// remainder) and appends chunk p to out[p].
void deal_contiguous(const std::vector<Index>& cols, int parties,
                     std::vector<std::vector<Index>>& out) {
  std::size_t n = cols.size();
  std::size_t base = n / static_cast<std::size_t>(parties);
  std::size_t extra = n % static_cast<std::size_t>(parties);
  std::size_t at = 0;
  for (int p = 0; p < parties; ++p) {
    std::size_t take = base + (static_cast<std::size_t>(p) < extra ? 1 : 0);
    for (std::size_t i = 0; i < take; ++i) out[static_cast<std::size_t>(p)].push_back(cols[at++]);
  }
}

std::pair<std::vector<Index>, std::vector<Index>> columns_by_kind(const Schema& schema) {
  std::vector<Index> cat, cont;
  for (Index c = 0; c < schema.num_columns(); ++c) {
    if (schema.columns[static_cast<std::size_t>(c)].kind == ColumnKind::Categorical)
      cat.push_back(c);
    else
      cont.push_back(c);
  }
  return {cat, cont};
}

}  // namespace

FeatureAssignment equal_split(const Schema& schema, int parties) {
  if (parties < 2) throw ConfigError("equal_split: need at least 2 parties");
  if (schema.num_columns() < parties)
    throw ConfigError("equal_split: fewer columns than parties");
  auto [cat, cont] = columns_by_kind(schema);
  FeatureAssignment fa;
  fa.party_columns.resize(static_cast<std::size_t>(parties));
  deal_contiguous(cat, parties, fa.party_columns);
  deal_contiguous(cont, parties, fa.party_columns);
  fa.validate(schema);
  return fa;
}

FeatureAssignment ratio_split(const Schema& schema, double target_ratio, int parties) {
  if (parties < 2) throw ConfigError("ratio_split: need at least 2 parties");
  if (!(target_ratio > 0.0 && target_ratio < 1.0))
    throw ConfigError("ratio_split: target ratio must lie strictly between 0 and 1");
  auto [cat, cont] = columns_by_kind(schema);
  auto take_trailing = [target_ratio](std::vector<Index>& cols) {
    std::size_t n = static_cast<std::size_t>(
        std::floor(target_ratio * static_cast<double>(cols.size())));
    std::vector<Index> tail(cols.end() - static_cast<std::ptrdiff_t>(n), cols.end());
    cols.resize(cols.size() - n);
    return tail;
  };
  std::vector<Index> target_cat = take_trailing(cat);
  std::vector<Index> target_cont = take_trailing(cont);
  if (target_cat.empty() && target_cont.empty())
    throw ConfigError("ratio_split: ratio " + std::to_string(target_ratio) +
                      " leaves the target party empty");
  FeatureAssignment fa;
  fa.party_columns.resize(static_cast<std::size_t>(parties));
  deal_contiguous(cat, parties - 1, fa.party_columns);
  deal_contiguous(cont, parties - 1, fa.party_columns);
  auto& target = fa.party_columns.back();
  target.insert(target.end(), target_cat.begin(), target_cat.end());
  target.insert(target.end(), target_cont.begin(), target_cont.end());
  fa.validate(schema);
  return fa;
}

std::vector<EncodedDataset> vertical_split(const EncodedDataset& data,
                                           const FeatureAssignment& assignment) {
  assignment.validate(data.schema);
  std::vector<EncodedDataset> views;
  for (const auto& cols : assignment.party_columns) {
    EncodedDataset v;
    v.schema = data.schema.subset(cols);
    v.schema.label.reset();
    v.has_labels = false;
    v.row_ids = data.row_ids;
    v.features = Matrix(data.rows(), v.schema.encoded_width());
    Index at = 0;
    for (Index c : cols) {
      Index off = data.schema.encoded_offset(c);
      Index k = data.schema.columns[static_cast<std::size_t>(c)].encoded_size();
      v.features.middleCols(at, k) = data.features.middleCols(off, k);
      at += k;
    }
    views.push_back(std::move(v));
  }
  return views;
}

EncodedDataset reassemble(const std::vector<EncodedDataset>& views,
                          const FeatureAssignment& assignment, const Schema& full_schema) {
  assignment.validate(full_schema);
  if (views.size() != assignment.party_columns.size())
    throw std::invalid_argument("reassemble: view count does not match assignment");
  Index rows = views.front().rows();
  EncodedDataset out;
  out.schema = full_schema;
  out.row_ids = views.front().row_ids;
  out.features = Matrix::Zero(rows, full_schema.encoded_width());
  for (std::size_t p = 0; p < views.size(); ++p) {
    const EncodedDataset& v = views[p];
    if (v.rows() != rows) throw std::invalid_argument("reassemble: row count mismatch");
    Index at = 0;
    for (Index c : assignment.party_columns[p]) {
      Index off = full_schema.encoded_offset(c);
      Index k = full_schema.columns[static_cast<std::size_t>(c)].encoded_size();
      out.features.middleCols(off, k) = v.features.middleCols(at, k);
      at += k;
    }
  }
  return out;
}

}  // namespace vflsim
