#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vflsim/attacks/scenarios.hpp"
#include "vflsim/metrics/metrics.hpp"
#include "vflsim/vfl/session.hpp"

namespace vflsim {

// Where the rows come from.  Generated datasets need only a name; CSV
// datasets need the file plus a schema describing its columns.
enum class DatasetKind { SyntheticTabular, SyntheticImage, Csv };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::SyntheticTabular;
  std::string name = "bank-like";  // generator profile, "image", or "csv"
  Index rows = 10000;              // generated datasets only
  std::uint64_t seed = 1;          // generator seed (fixed across run seeds)
  Index image_side = 16;
  std::string csv_path;
  std::string schema_path;
};

struct SplitSpec {
  // Fraction of each column kind handed to the target party; ignored when
  // party_columns lists the assignment explicitly (one name list per party).
  double feature_ratio = 0.5;
  std::vector<std::vector<std::string>> party_columns;
  int parties = 2;
  double train_fraction = 0.8;
};

// One experiment: dataset -> split -> federated training -> one attack
// scenario -> reconstruction metrics, repeated per seed.
struct ExperimentConfig {
  int spec_version = 1;
  DatasetSpec dataset;
  SplitSpec split;
  SessionConfig session;  // session.seed is overwritten by each run seed
  AttackConfig attack;    // attack.seed is overwritten by each run seed
  MetricConfig metric;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir = "runs";
  // Optional sweep section; required by the sweep verb, ignored by the rest.
  struct Sweep {
    std::string axis;  // aux_ratio | leak_count | split_ratio | noise_ratio | invernet_depth
    std::vector<double> values;
  };
  std::optional<Sweep> sweep;
};

// Strict parser: unknown keys anywhere in the tree are errors, as are missing
// files, bad enum names, and out-of-range knobs.  All throw ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonical round-trip of the parsed config (stable key order, all fields
// explicit).  Reports embed this text; the hash is FNV-1a 64 of it.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

// Range/consistency checks shared by the parser and the CLI's validate verb.
void validate_experiment_config(const ExperimentConfig& cfg);

}  // namespace vflsim
