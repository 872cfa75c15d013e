#include "vflsim/data/schema.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace vflsim {

using nlohmann::json;

Index Schema::num_categorical() const {
  Index n = 0;
  for (const auto& c : columns)
    if (c.kind == ColumnKind::Categorical) ++n;
  return n;
}

Index Schema::num_continuous() const {
  return num_columns() - num_categorical();
}

Index Schema::encoded_width() const {
  Index w = 0;
  for (const auto& c : columns) w += c.encoded_size();
  return w;
}

Index Schema::encoded_offset(Index col) const {
  if (col < 0 || col >= num_columns())
    throw std::invalid_argument("Schema::encoded_offset: column out of range");
  Index off = 0;
  for (Index i = 0; i < col; ++i) off += columns[static_cast<std::size_t>(i)].encoded_size();
  return off;
}

void Schema::validate() const {
  if (columns.empty()) throw ConfigError("schema '" + name + "': no columns");
  std::set<std::string> names;
  for (const auto& c : columns) {
    if (c.name.empty()) throw ConfigError("schema '" + name + "': unnamed column");
    if (!names.insert(c.name).second)
      throw ConfigError("schema '" + name + "': duplicate column '" + c.name + "'");
    if (c.kind == ColumnKind::Categorical) {
      if (c.categories.size() < 2)
        throw ConfigError("schema '" + name + "': column '" + c.name +
                          "' needs at least 2 categories");
      std::set<std::string> cats(c.categories.begin(), c.categories.end());
      if (cats.size() != c.categories.size())
        throw ConfigError("schema '" + name + "': column '" + c.name +
                          "' has duplicate categories");
    } else {
      if (!(c.min <= c.max))
        throw ConfigError("schema '" + name + "': column '" + c.name + "' has min > max");
    }
  }
  if (label) {
    if (label->classes.size() < 2)
      throw ConfigError("schema '" + name + "': label needs at least 2 classes");
    if (names.count(label->name))
      throw ConfigError("schema '" + name + "': label name collides with a feature column");
  }
}

Schema Schema::subset(const std::vector<Index>& cols) const {
  Schema out;
  out.name = name;
  out.delimiter = delimiter;
  out.has_header = has_header;
  for (Index c : cols) {
    if (c < 0 || c >= num_columns())
      throw std::invalid_argument("Schema::subset: column index out of range");
    out.columns.push_back(columns[static_cast<std::size_t>(c)]);
  }
  out.validate();
  return out;
}

namespace {

json column_to_json(const Column& c) {
  json j;
  j["name"] = c.name;
  if (c.kind == ColumnKind::Categorical) {
    j["kind"] = "categorical";
    j["categories"] = c.categories;
  } else {
    j["kind"] = "continuous";
    j["min"] = c.min;
    j["max"] = c.max;
  }
  return j;
}

Column column_from_json(const json& j) {
  Column c;
  if (!j.contains("name") || !j.contains("kind"))
    throw ConfigError("schema column: 'name' and 'kind' are required");
  c.name = j.at("name").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "categorical") {
    c.kind = ColumnKind::Categorical;
    if (!j.contains("categories"))
      throw ConfigError("schema column '" + c.name + "': missing 'categories'");
    c.categories = j.at("categories").get<std::vector<std::string>>();
  } else if (kind == "continuous") {
    c.kind = ColumnKind::Continuous;
    if (!j.contains("min") || !j.contains("max"))
      throw ConfigError("schema column '" + c.name + "': missing 'min'/'max'");
    c.min = j.at("min").get<double>();
    c.max = j.at("max").get<double>();
  } else {
    throw ConfigError("schema column '" + c.name + "': unknown kind '" + kind + "'");
  }
  return c;
}

}  // namespace

std::string Schema::to_json() const {
  json j;
  j["name"] = name;
  j["delimiter"] = std::string(1, delimiter);
  j["has_header"] = has_header;
  j["columns"] = json::array();
  for (const auto& c : columns) j["columns"].push_back(column_to_json(c));
  if (label) {
    j["label"] = {{"name", label->name}, {"classes", label->classes}};
  }
  return j.dump(2);
}

Schema Schema::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
  }
  Schema s;
  if (!j.contains("name") || !j.contains("columns"))
    throw ConfigError("schema: 'name' and 'columns' are required");
  s.name = j.at("name").get<std::string>();
  if (j.contains("delimiter")) {
    std::string d = j.at("delimiter").get<std::string>();
    if (d.size() != 1) throw ConfigError("schema '" + s.name + "': delimiter must be one character");
    s.delimiter = d[0];
  }
  if (j.contains("has_header")) s.has_header = j.at("has_header").get<bool>();
  for (const auto& jc : j.at("columns")) s.columns.push_back(column_from_json(jc));
  if (j.contains("label")) {
    LabelSpec l;
    l.name = j.at("label").at("name").get<std::string>();
    l.classes = j.at("label").at("classes").get<std::vector<std::string>>();
    s.label = l;
  }
  s.validate();
  return s;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Schema::from_json(ss.str());
}

void save_schema(const Schema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write schema file: " + path);
  out << schema.to_json() << "\n";
}

}  // namespace vflsim
