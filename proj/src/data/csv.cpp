#include "vflsim/data/csv.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace vflsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  std::string t = s.substr(a, b - a + 1);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cur += ch;
    } else if (ch == delim && !quoted) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_number(const std::string& field, std::size_t row, const std::string& col) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("row " + std::to_string(row) + ", column '" + col + "': '" + field +
                      "' is not a number");
  return v;
}

}  // namespace

RawDataset load_dataset(const std::string& path, const Schema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path);

  // category string -> index, per categorical column
  std::vector<std::unordered_map<std::string, Index>> lookup(
      static_cast<std::size_t>(schema.num_columns()));
  for (Index c = 0; c < schema.num_columns(); ++c) {
    const Column& col = schema.columns[static_cast<std::size_t>(c)];
    if (col.kind != ColumnKind::Categorical) continue;
    for (std::size_t k = 0; k < col.categories.size(); ++k)
      lookup[static_cast<std::size_t>(c)][col.categories[k]] = static_cast<Index>(k);
  }
  std::unordered_map<std::string, int> label_lookup;
  if (schema.label)
    for (std::size_t k = 0; k < schema.label->classes.size(); ++k)
      label_lookup[schema.label->classes[k]] = static_cast<int>(k);

  std::size_t expected = static_cast<std::size_t>(schema.num_columns()) + (schema.label ? 1 : 0);
  std::vector<std::vector<double>> cell_rows;
  std::vector<int> labels;
  std::vector<std::int64_t> row_ids;

  std::string line;
  std::size_t line_no = 0, data_row = 0;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (schema.has_header && !skipped_header) {
      skipped_header = true;
      std::vector<std::string> names = split_line(line, schema.delimiter);
      auto present = [&](const std::string& want) {
        for (const std::string& n : names)
          if (n == want) return true;
        return false;
      };
      for (Index c = 0; c < schema.num_columns(); ++c) {
        const std::string& want = schema.columns[static_cast<std::size_t>(c)].name;
        if (!present(want))
          throw ConfigError("header is missing column '" + want + "' in " + path);
      }
      if (schema.label && !present(schema.label->name))
        throw ConfigError("header is missing label column '" + schema.label->name + "' in " +
                          path);
      if (names.size() != expected)
        throw ConfigError("header has " + std::to_string(names.size()) + " fields, schema has " +
                          std::to_string(expected));
      continue;
    }
    std::vector<std::string> fields = split_line(line, schema.delimiter);
    if (fields.size() != expected)
      throw ConfigError("row " + std::to_string(data_row) + " (line " + std::to_string(line_no) +
                        "): expected " + std::to_string(expected) + " fields, found " +
                        std::to_string(fields.size()));
    std::vector<double> cells(static_cast<std::size_t>(schema.num_columns()));
    for (Index c = 0; c < schema.num_columns(); ++c) {
      const Column& col = schema.columns[static_cast<std::size_t>(c)];
      const std::string& field = fields[static_cast<std::size_t>(c)];
      if (col.kind == ColumnKind::Categorical) {
        auto it = lookup[static_cast<std::size_t>(c)].find(field);
        if (it == lookup[static_cast<std::size_t>(c)].end())
          throw ConfigError("row " + std::to_string(data_row) + ", column '" + col.name +
                            "': unknown category '" + field + "'");
        cells[static_cast<std::size_t>(c)] = static_cast<double>(it->second);
      } else {
        double v = parse_number(field, data_row, col.name);
        if (v < col.min || v > col.max)
          throw ConfigError("row " + std::to_string(data_row) + ", column '" + col.name +
                            "': value " + field + " outside schema range");
        cells[static_cast<std::size_t>(c)] = v;
      }
    }
    if (schema.label) {
      const std::string& field = fields.back();
      auto it = label_lookup.find(field);
      if (it == label_lookup.end())
        throw ConfigError("row " + std::to_string(data_row) + ": unknown label '" + field + "'");
      labels.push_back(it->second);
    }
    cell_rows.push_back(std::move(cells));
    row_ids.push_back(static_cast<std::int64_t>(data_row));
    ++data_row;
  }
  if (cell_rows.empty()) throw ConfigError("data file has no rows: " + path);

  RawDataset out;
  out.schema = schema;
  out.has_labels = schema.label.has_value();
  out.labels = std::move(labels);
  out.row_ids = std::move(row_ids);
  out.cells = Matrix(static_cast<Index>(cell_rows.size()), schema.num_columns());
  for (std::size_t r = 0; r < cell_rows.size(); ++r)
    for (Index c = 0; c < schema.num_columns(); ++c)
      out.cells(static_cast<Index>(r), c) = cell_rows[r][static_cast<std::size_t>(c)];
  return out;
}

void write_dataset(const RawDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write data file: " + path);
  const Schema& s = data.schema;
  if (s.has_header) {
    for (Index c = 0; c < s.num_columns(); ++c) {
      if (c) out << s.delimiter;
      out << s.columns[static_cast<std::size_t>(c)].name;
    }
    if (s.label) out << s.delimiter << s.label->name;
    out << "\n";
  }
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < s.num_columns(); ++c) {
      if (c) out << s.delimiter;
      const Column& col = s.columns[static_cast<std::size_t>(c)];
      if (col.kind == ColumnKind::Categorical) {
        out << col.categories[static_cast<std::size_t>(static_cast<Index>(data.cells(r, c)))];
      } else {
        out << data.cells(r, c);
      }
    }
    if (s.label) {
      out << s.delimiter
          << s.label->classes[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r)])];
    }
    out << "\n";
  }
}

}  // namespace vflsim
