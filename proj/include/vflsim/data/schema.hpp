#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vflsim/types.hpp"

namespace vflsim {

enum class ColumnKind { Categorical, Continuous };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> categories;  // categorical only
  double min = 0.0, max = 0.0;          // continuous only

  Index encoded_size() const {
    return kind == ColumnKind::Categorical ? static_cast<Index>(categories.size()) : 1;
  }
};

struct LabelSpec {
  std::string name;
  std::vector<std::string> classes;
};

// Column layout of one tabular source.  Encoding: continuous columns are
// affinely mapped to [-1, 1] using [min, max]; categorical columns expand to
// one-hot groups (category order fixed by the schema).
struct Schema {
  std::string name;
  char delimiter = ',';
  bool has_header = false;
  std::vector<Column> columns;
  std::optional<LabelSpec> label;

  Index num_columns() const { return static_cast<Index>(columns.size()); }
  Index num_categorical() const;
  Index num_continuous() const;
  Index encoded_width() const;
  // First encoded column of source column `col`.
  Index encoded_offset(Index col) const;

  // Throws ConfigError on duplicate names, empty category lists, min > max, ...
  void validate() const;

  // New schema holding the given source columns in the given order (label dropped).
  Schema subset(const std::vector<Index>& cols) const;

  std::string to_json() const;
  static Schema from_json(const std::string& text);
};

Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path);

}  // namespace vflsim
