#include "vflsim/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vflsim/types.hpp"
#include "vflsim/harness/synthetic.hpp"

namespace vflsim {
namespace {

using nlohmann::json;

// Every object in the config tree is checked against its allowed key set so
// a typo fails loudly instead of silently running with a default.
void reject_unknown_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

Index as_index(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
  return j.get<Index>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + " must be true or false");
  return j.get<bool>();
}

std::vector<Index> as_index_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of integers");
  std::vector<Index> out;
  for (const auto& v : j) out.push_back(as_index(v, where + " entry"));
  return out;
}

void parse_dataset(const json& j, DatasetSpec& d) {
  reject_unknown_keys(j, "dataset",
                      {"name", "rows", "seed", "image_side", "csv_path", "schema_path"});
  if (const json* v = find(j, "name")) d.name = as_string(*v, "dataset.name");
  if (const json* v = find(j, "rows")) d.rows = as_index(*v, "dataset.rows");
  if (const json* v = find(j, "seed"))
    d.seed = static_cast<std::uint64_t>(as_index(*v, "dataset.seed"));
  if (const json* v = find(j, "image_side"))
    d.image_side = as_index(*v, "dataset.image_side");
  if (const json* v = find(j, "csv_path")) d.csv_path = as_string(*v, "dataset.csv_path");
  if (const json* v = find(j, "schema_path"))
    d.schema_path = as_string(*v, "dataset.schema_path");

  if (is_synthetic_tabular_name(d.name)) d.kind = DatasetKind::SyntheticTabular;
  else if (d.name == "image") d.kind = DatasetKind::SyntheticImage;
  else if (d.name == "csv") d.kind = DatasetKind::Csv;
  else
    throw ConfigError("dataset.name '" + d.name +
                      "' is not a generator profile, 'image', or 'csv'");
  if (d.kind == DatasetKind::Csv && (d.csv_path.empty() || d.schema_path.empty()))
    throw ConfigError("dataset.name 'csv' needs dataset.csv_path and dataset.schema_path");
}

void parse_split(const json& j, SplitSpec& s, SessionConfig& session) {
  reject_unknown_keys(
      j, "split",
      {"feature_ratio", "party_columns", "parties", "train_fraction", "target_party"});
  if (const json* v = find(j, "target_party"))
    session.target_party = static_cast<int>(as_index(*v, "split.target_party"));
  if (const json* v = find(j, "feature_ratio"))
    s.feature_ratio = as_number(*v, "split.feature_ratio");
  if (const json* v = find(j, "parties"))
    s.parties = static_cast<int>(as_index(*v, "split.parties"));
  if (const json* v = find(j, "train_fraction"))
    s.train_fraction = as_number(*v, "split.train_fraction");
  if (const json* v = find(j, "party_columns")) {
    if (!v->is_array()) throw ConfigError("split.party_columns must be an array of arrays");
    for (const auto& party : *v) {
      if (!party.is_array())
        throw ConfigError("split.party_columns entries must be arrays of column names");
      std::vector<std::string> names;
      for (const auto& n : party) names.push_back(as_string(n, "split.party_columns name"));
      s.party_columns.push_back(std::move(names));
    }
  }
}

void parse_model(const json& j, SessionConfig& m) {
  reject_unknown_keys(j, "model",
                      {"bottom_widths", "top_hidden", "batch_size", "learning_rate",
                       "epochs", "patience", "optimizer", "capture_window_epochs"});
  if (const json* v = find(j, "bottom_widths"))
    m.bottom_widths = as_index_list(*v, "model.bottom_widths");
  if (const json* v = find(j, "top_hidden"))
    m.top_hidden = as_index_list(*v, "model.top_hidden");
  if (const json* v = find(j, "batch_size"))
    m.hyper.batch_size = as_index(*v, "model.batch_size");
  if (const json* v = find(j, "learning_rate"))
    m.hyper.learning_rate = as_number(*v, "model.learning_rate");
  if (const json* v = find(j, "epochs"))
    m.epochs = static_cast<int>(as_index(*v, "model.epochs"));
  if (const json* v = find(j, "patience"))
    m.patience = static_cast<int>(as_index(*v, "model.patience"));
  if (const json* v = find(j, "capture_window_epochs"))
    m.capture_window_epochs = static_cast<int>(as_number(*v, "model.capture_window_epochs"));
  if (const json* v = find(j, "optimizer")) {
    std::string name = as_string(*v, "model.optimizer");
    if (name == "adam") m.hyper.optimizer.kind = OptimizerKind::Adam;
    else if (name == "sgd") m.hyper.optimizer.kind = OptimizerKind::SGD;
    else throw ConfigError("model.optimizer must be 'adam' or 'sgd', got '" + name + "'");
  }
}

void parse_defense(const json& j, DefenseConfig& d) {
  reject_unknown_keys(j, "defense", {"kind", "ratio", "clip"});
  if (const json* v = find(j, "kind"))
    d.kind = defense_kind_from_string(as_string(*v, "defense.kind"));
  if (const json* v = find(j, "ratio")) d.ratio = as_number(*v, "defense.ratio");
  if (const json* v = find(j, "clip")) d.clip = as_number(*v, "defense.clip");
}

// Callers reject unknown keys first; some wrap extra fields around the hypers.
void parse_hyper(const json& j, const std::string& where, TrainHyper& h) {
  if (const json* v = find(j, "batch_size"))
    h.batch_size = as_index(*v, where + ".batch_size");
  if (const json* v = find(j, "iterations"))
    h.iterations = as_index(*v, where + ".iterations");
  if (const json* v = find(j, "learning_rate"))
    h.learning_rate = as_number(*v, where + ".learning_rate");
}

void parse_attack(const json& j, AttackConfig& a) {
  reject_unknown_keys(j, "attack",
                      {"scenario", "aux_ratio", "fake_rows", "schema_guided", "leak_count",
                       "invernet", "shadow"});
  if (const json* v = find(j, "scenario"))
    a.scenario = scenario_from_string(as_string(*v, "attack.scenario"));
  if (const json* v = find(j, "aux_ratio")) a.aux_ratio = as_number(*v, "attack.aux_ratio");
  if (const json* v = find(j, "fake_rows")) a.fake_rows = as_index(*v, "attack.fake_rows");
  if (const json* v = find(j, "schema_guided"))
    a.schema_guided = as_bool(*v, "attack.schema_guided");
  if (const json* v = find(j, "leak_count")) a.leak_count = as_index(*v, "attack.leak_count");
  if (const json* v = find(j, "invernet")) {
    reject_unknown_keys(*v, "attack.invernet",
                        {"depth", "batch_size", "iterations", "learning_rate"});
    if (const json* d = find(*v, "depth"))
      a.invernet.depth = static_cast<int>(as_index(*d, "attack.invernet.depth"));
    parse_hyper(*v, "attack.invernet", a.invernet.hyper);
  }
  if (const json* v = find(j, "shadow")) {
    reject_unknown_keys(*v, "attack.shadow", {"batch_size", "iterations", "learning_rate"});
    parse_hyper(*v, "attack.shadow", a.shadow_hyper);
  }
}

void parse_metrics(const json& j, MetricConfig& m) {
  reject_unknown_keys(j, "metrics", {"epsilon"});
  if (const json* v = find(j, "epsilon")) m.epsilon = as_number(*v, "metrics.epsilon");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j, "config root",
                      {"spec_version", "dataset", "split", "model", "defense", "attack",
                       "metrics", "seeds", "out_dir", "sweep"});

  ExperimentConfig cfg;
  const json* sv = find(j, "spec_version");
  if (!sv) throw ConfigError("config needs a spec_version field");
  cfg.spec_version = static_cast<int>(as_index(*sv, "spec_version"));
  if (cfg.spec_version != 1)
    throw ConfigError("unsupported spec_version " + std::to_string(cfg.spec_version));

  if (const json* v = find(j, "dataset")) parse_dataset(*v, cfg.dataset);
  if (const json* v = find(j, "split")) parse_split(*v, cfg.split, cfg.session);
  if (const json* v = find(j, "model")) parse_model(*v, cfg.session);
  if (const json* v = find(j, "defense")) parse_defense(*v, cfg.session.defense);
  if (const json* v = find(j, "attack")) parse_attack(*v, cfg.attack);
  if (const json* v = find(j, "metrics")) parse_metrics(*v, cfg.metric);
  if (const json* v = find(j, "out_dir")) cfg.out_dir = as_string(*v, "out_dir");
  if (const json* v = find(j, "seeds")) {
    if (!v->is_array()) throw ConfigError("seeds must be an array of integers");
    cfg.seeds.clear();
    for (const auto& s : *v)
      cfg.seeds.push_back(static_cast<std::uint64_t>(as_index(s, "seeds entry")));
  }
  if (const json* v = find(j, "sweep")) {
    reject_unknown_keys(*v, "sweep", {"axis", "values"});
    ExperimentConfig::Sweep sw;
    const json* axis = find(*v, "axis");
    if (!axis) throw ConfigError("sweep needs an axis field");
    sw.axis = as_string(*axis, "sweep.axis");
    const json* values = find(*v, "values");
    if (!values || !values->is_array())
      throw ConfigError("sweep needs a values array");
    for (const auto& x : *values) sw.values.push_back(as_number(x, "sweep.values entry"));
    cfg.sweep = std::move(sw);
  }

  validate_experiment_config(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

void validate_experiment_config(const ExperimentConfig& cfg) {
  const DatasetSpec& d = cfg.dataset;
  if (d.kind != DatasetKind::Csv && d.rows < 10)
    throw ConfigError("dataset.rows must be at least 10");
  if (d.kind == DatasetKind::SyntheticImage && (d.image_side < 8 || d.image_side > 32))
    throw ConfigError("dataset.image_side must lie in [8, 32]");

  const SplitSpec& s = cfg.split;
  if (s.parties < 2) throw ConfigError("split.parties must be at least 2");
  if (!(s.train_fraction > 0.0 && s.train_fraction < 1.0))
    throw ConfigError("split.train_fraction must lie strictly between 0 and 1");
  if (s.party_columns.empty() && !(s.feature_ratio > 0.0 && s.feature_ratio < 1.0))
    throw ConfigError("split.feature_ratio must lie strictly between 0 and 1");
  if (!s.party_columns.empty() &&
      static_cast<int>(s.party_columns.size()) != s.parties)
    throw ConfigError("split.party_columns must list one column set per party");

  if (cfg.session.target_party < 1 || cfg.session.target_party >= s.parties)
    throw ConfigError("target party must be a passive party index");
  if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty");

  const AttackConfig& a = cfg.attack;
  AttackCapabilities caps = capabilities_for(a.scenario);
  if (caps.auxiliary_data && !(a.aux_ratio > 0.0 && a.aux_ratio <= 1.0))
    throw ConfigError("attack.aux_ratio must lie in (0, 1]");
  if (caps.leaked_pairs && a.leak_count < 1)
    throw ConfigError("attack.leak_count must be positive");
  if (a.invernet.depth < 1 || a.invernet.depth > 3)
    throw ConfigError("attack.invernet.depth must be 1, 2, or 3");

  if (cfg.sweep) {
    static const std::set<std::string> axes{"aux_ratio", "leak_count", "split_ratio",
                                           "noise_ratio", "invernet_depth"};
    if (!axes.count(cfg.sweep->axis))
      throw ConfigError("sweep.axis '" + cfg.sweep->axis + "' is not a sweep axis");
    if (cfg.sweep->values.empty()) throw ConfigError("sweep.values must not be empty");
    bool needs_aux = cfg.sweep->axis == "aux_ratio";
    bool needs_leaks = cfg.sweep->axis == "leak_count";
    if (needs_aux && !capabilities_for(a.scenario).auxiliary_data)
      throw ConfigError("sweep axis aux_ratio needs a scenario with auxiliary data");
    if (needs_leaks && !capabilities_for(a.scenario).leaked_pairs)
      throw ConfigError("sweep axis leak_count needs a scenario with leaked pairs");
  }
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  json j;
  j["spec_version"] = cfg.spec_version;
  json d;
  d["name"] = cfg.dataset.name;
  d["rows"] = cfg.dataset.rows;
  d["seed"] = cfg.dataset.seed;
  if (cfg.dataset.kind == DatasetKind::SyntheticImage)
    d["image_side"] = cfg.dataset.image_side;
  if (cfg.dataset.kind == DatasetKind::Csv) {
    d["csv_path"] = cfg.dataset.csv_path;
    d["schema_path"] = cfg.dataset.schema_path;
  }
  j["dataset"] = d;

  json s;
  s["feature_ratio"] = cfg.split.feature_ratio;
  if (!cfg.split.party_columns.empty()) s["party_columns"] = cfg.split.party_columns;
  s["parties"] = cfg.split.parties;
  s["target_party"] = cfg.session.target_party;
  s["train_fraction"] = cfg.split.train_fraction;
  j["split"] = s;

  json m;
  m["bottom_widths"] = cfg.session.bottom_widths;
  m["top_hidden"] = cfg.session.top_hidden;
  m["batch_size"] = cfg.session.hyper.batch_size;
  m["learning_rate"] = cfg.session.hyper.learning_rate;
  m["epochs"] = cfg.session.epochs;
  m["patience"] = cfg.session.patience;
  m["optimizer"] =
      cfg.session.hyper.optimizer.kind == OptimizerKind::Adam ? "adam" : "sgd";
  m["capture_window_epochs"] = cfg.session.capture_window_epochs;
  j["model"] = m;

  json def;
  def["kind"] = to_string(cfg.session.defense.kind);
  def["ratio"] = cfg.session.defense.ratio;
  def["clip"] = cfg.session.defense.clip;
  j["defense"] = def;

  json a;
  a["scenario"] = to_string(cfg.attack.scenario);
  a["aux_ratio"] = cfg.attack.aux_ratio;
  a["fake_rows"] = cfg.attack.fake_rows;
  a["schema_guided"] = cfg.attack.schema_guided;
  a["leak_count"] = cfg.attack.leak_count;
  json inv;
  inv["depth"] = cfg.attack.invernet.depth;
  inv["batch_size"] = cfg.attack.invernet.hyper.batch_size;
  inv["iterations"] = cfg.attack.invernet.hyper.iterations;
  inv["learning_rate"] = cfg.attack.invernet.hyper.learning_rate;
  a["invernet"] = inv;
  json sh;
  sh["batch_size"] = cfg.attack.shadow_hyper.batch_size;
  sh["iterations"] = cfg.attack.shadow_hyper.iterations;
  sh["learning_rate"] = cfg.attack.shadow_hyper.learning_rate;
  a["shadow"] = sh;
  j["attack"] = a;

  json met;
  met["epsilon"] = cfg.metric.epsilon;
  j["metrics"] = met;

  j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  if (cfg.sweep) {
    json sw;
    sw["axis"] = cfg.sweep->axis;
    sw["values"] = cfg.sweep->values;
    j["sweep"] = sw;
  }
  return j.dump(2);
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::string text = canonical_config_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace vflsim
