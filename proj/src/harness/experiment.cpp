#include "vflsim/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vflsim/data/csv.hpp"
#include "vflsim/data/sampling.hpp"
#include "vflsim/harness/synthetic.hpp"
#include "vflsim/types.hpp"

namespace vflsim {
namespace {

using json = nlohmann::ordered_json;

FeatureAssignment named_assignment(const Schema& schema,
                                   const std::vector<std::vector<std::string>>& names) {
  FeatureAssignment out;
  out.party_columns.resize(names.size());
  for (std::size_t p = 0; p < names.size(); ++p) {
    for (const std::string& name : names[p]) {
      Index col = -1;
      for (Index c = 0; c < schema.num_columns(); ++c)
        if (schema.columns[static_cast<std::size_t>(c)].name == name) col = c;
      if (col < 0) throw ConfigError("party_columns names unknown column '" + name + "'");
      out.party_columns[p].push_back(col);
    }
  }
  out.validate(schema);
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData out;
  switch (cfg.dataset.kind) {
    case DatasetKind::SyntheticTabular:
      out.full = make_synthetic_tabular(cfg.dataset.name, cfg.dataset.rows, cfg.dataset.seed);
      break;
    case DatasetKind::SyntheticImage:
      out.full = make_synthetic_image_dataset(cfg.dataset.image_side, cfg.dataset.rows,
                                              cfg.dataset.seed);
      out.image = true;
      break;
    case DatasetKind::Csv: {
      Schema schema = load_schema(cfg.dataset.schema_path);
      out.full = encode(load_dataset(cfg.dataset.csv_path, schema));
      break;
    }
  }
  if (!cfg.split.party_columns.empty())
    out.assignment = named_assignment(out.full.schema, cfg.split.party_columns);
  else
    out.assignment = ratio_split(out.full.schema, cfg.split.feature_ratio, cfg.split.parties);
  out.views = vertical_split(out.full, out.assignment);
  if (out.image) {
    Index side = cfg.dataset.image_side;
    Index held = out.views[static_cast<std::size_t>(cfg.session.target_party)].width();
    if (held % side != 0)
      throw ConfigError("image split must hand the target a whole number of pixel columns");
    out.image_height = held / side;  // image columns held, stored one per block
    out.image_width = side;
  }
  return out;
}

VflSession train_session(const ExperimentConfig& cfg, const PreparedData& data,
                         std::uint64_t seed, TrainResult* result) {
  SessionConfig scfg = cfg.session;
  scfg.seed = seed;
  scfg.record_training_captures = true;
  RowSplit rows =
      split_rows(data.full.rows(), cfg.split.train_fraction, RngStream(seed).split("rows"));
  VflSession session =
      VflSession::build(data.views, data.full.labels, std::move(rows), scfg);
  TrainResult tr = session.train();
  if (result) *result = tr;
  return session;
}

namespace {

SeedOutcome measure_seed(const ExperimentConfig& cfg, const PreparedData& data,
                         std::uint64_t seed) {
  TrainResult tr;
  VflSession session = train_session(cfg, data, seed, &tr);
  AttackConfig acfg = cfg.attack;
  acfg.seed = seed;
  AttackReport rep = run_attack(session, acfg);

  const EncodedDataset& target_view =
      data.views[static_cast<std::size_t>(cfg.session.target_party)];
  Matrix truth = take_rows(target_view, rep.attacked_positions).features;
  EncodedDataset fake = generate_fake(target_view.schema, truth.rows(),
                                      RngStream(seed).split("baseline"));

  SeedOutcome o;
  o.seed = seed;
  o.vfl_accuracy = tr.holdout_accuracy;
  o.vfl_auc = tr.holdout_auc;
  o.epochs_run = tr.epochs_run;
  o.attack = reconstruction_accuracy(rep.reconstructed, truth, target_view.schema, cfg.metric);
  o.random_guess =
      reconstruction_accuracy(fake.features, truth, target_view.schema, cfg.metric);
  if (data.image) {
    Matrix recon = rep.reconstructed.cwiseMax(-1.0).cwiseMin(1.0);
    o.psnr_db = psnr(recon, truth, cfg.metric.data_range);
    o.ssim = mean_ssim(recon, truth, data.image_height, data.image_width,
                       cfg.metric.data_range);
    o.random_ssim = mean_ssim(fake.features, truth, data.image_height, data.image_width,
                              cfg.metric.data_range);
  }
  o.queries_used = static_cast<double>(rep.queries_used);
  o.invernet_pairs = static_cast<double>(rep.invernet_pairs);
  o.attacked_rows = static_cast<double>(rep.attacked_positions.size());
  return o;
}

// The numeric fields that aggregate across seeds, addressed uniformly.
using Field = double SeedOutcome::*;
constexpr Field kFields[] = {
    &SeedOutcome::vfl_accuracy,  &SeedOutcome::vfl_auc,       &SeedOutcome::epochs_run,
    &SeedOutcome::psnr_db,       &SeedOutcome::ssim,          &SeedOutcome::random_ssim,
    &SeedOutcome::queries_used,  &SeedOutcome::invernet_pairs, &SeedOutcome::attacked_rows};
using TripleField = AccuracyTriple SeedOutcome::*;
using TripleSlot = double AccuracyTriple::*;
constexpr TripleField kTriples[] = {&SeedOutcome::attack, &SeedOutcome::random_guess};
constexpr TripleSlot kSlots[] = {&AccuracyTriple::overall, &AccuracyTriple::discrete,
                                 &AccuracyTriple::continuous};

SeedOutcome mean_outcome(const std::vector<SeedOutcome>& all) {
  SeedOutcome m;
  const double n = static_cast<double>(all.size());
  for (Field f : kFields)
    for (const SeedOutcome& o : all) m.*f += o.*f / n;
  for (TripleField t : kTriples)
    for (TripleSlot s : kSlots)
      for (const SeedOutcome& o : all) m.*t.*s += o.*t.*s / n;
  return m;
}

SeedOutcome stddev_outcome(const std::vector<SeedOutcome>& all, const SeedOutcome& m) {
  SeedOutcome sd;
  const double n = static_cast<double>(all.size());
  for (Field f : kFields) {
    double acc = 0.0;
    for (const SeedOutcome& o : all) acc += (o.*f - m.*f) * (o.*f - m.*f);
    sd.*f = std::sqrt(acc / n);
  }
  for (TripleField t : kTriples)
    for (TripleSlot s : kSlots) {
      double acc = 0.0;
      for (const SeedOutcome& o : all) acc += (o.*t.*s - m.*t.*s) * (o.*t.*s - m.*t.*s);
      sd.*t.*s = std::sqrt(acc / n);
    }
  return sd;
}

json triple_json(const AccuracyTriple& t) {
  json j;
  j["overall"] = t.overall;
  j["discrete"] = t.discrete;
  j["continuous"] = t.continuous;
  return j;
}

json outcome_json(const SeedOutcome& o, bool image, bool per_seed) {
  json j;
  if (per_seed) j["seed"] = o.seed;
  j["vfl_accuracy"] = o.vfl_accuracy;
  j["vfl_auc"] = o.vfl_auc;
  j["epochs"] = per_seed ? json(static_cast<long long>(o.epochs_run)) : json(o.epochs_run);
  j["attack"] = triple_json(o.attack);
  j["random_guess"] = triple_json(o.random_guess);
  if (image) {
    j["psnr_db"] = o.psnr_db;
    j["ssim"] = o.ssim;
    j["random_ssim"] = o.random_ssim;
  }
  j["queries_used"] =
      per_seed ? json(static_cast<long long>(o.queries_used)) : json(o.queries_used);
  j["invernet_pairs"] =
      per_seed ? json(static_cast<long long>(o.invernet_pairs)) : json(o.invernet_pairs);
  j["attacked_rows"] =
      per_seed ? json(static_cast<long long>(o.attacked_rows)) : json(o.attacked_rows);
  return j;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  PreparedData data = prepare_data(cfg);
  RunReport report;
  report.config = cfg;
  report.digest = config_digest(cfg);
  report.image_data = data.image;
  for (std::uint64_t seed : cfg.seeds) report.per_seed.push_back(measure_seed(cfg, data, seed));
  report.mean = mean_outcome(report.per_seed);
  report.stddev = stddev_outcome(report.per_seed, report.mean);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string report_json(const RunReport& report) {
  json j;
  j["library_version"] = library_version();
  j["config_digest"] = report.digest;
  j["config"] = json::parse(canonical_config_text(report.config));
  j["image_data"] = report.image_data;
  json seeds = json::array();
  for (const SeedOutcome& o : report.per_seed)
    seeds.push_back(outcome_json(o, report.image_data, true));
  j["per_seed"] = seeds;
  j["mean"] = outcome_json(report.mean, report.image_data, false);
  j["stddev"] = outcome_json(report.stddev, report.image_data, false);
  // The one deliberately non-reproducible block: everything wall-clock lives
  // here so the rest of the file is byte-identical across reruns.
  json timing;
  timing["wall_seconds"] = report.wall_seconds;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

std::string write_report(const RunReport& report, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::path dir(report.config.out_dir);
  fs::create_directories(dir);
  fs::path path = dir / (stem + ".json");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report to " + path.string());
  out << report_json(report);
  return path.string();
}

namespace {

AccuracyTriple triple_from_json(const json& j) {
  AccuracyTriple t;
  t.overall = j.value("overall", 0.0);
  t.discrete = j.at("discrete").is_null() ? std::nan("") : j.value("discrete", 0.0);
  t.continuous = j.at("continuous").is_null() ? std::nan("") : j.value("continuous", 0.0);
  return t;
}

SeedOutcome outcome_from_json(const json& j) {
  SeedOutcome o;
  o.seed = j.value("seed", std::uint64_t{0});
  o.vfl_accuracy = j.at("vfl_accuracy").get<double>();
  o.vfl_auc = j.at("vfl_auc").get<double>();
  o.epochs_run = j.at("epochs").get<double>();
  o.attack = triple_from_json(j.at("attack"));
  o.random_guess = triple_from_json(j.at("random_guess"));
  o.psnr_db = j.value("psnr_db", 0.0);
  o.ssim = j.value("ssim", 0.0);
  o.random_ssim = j.value("random_ssim", 0.0);
  o.queries_used = j.at("queries_used").get<double>();
  o.invernet_pairs = j.at("invernet_pairs").get<double>();
  o.attacked_rows = j.at("attacked_rows").get<double>();
  return o;
}

}  // namespace

RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
    RunReport report;
    report.config = parse_experiment_config(j.at("config").dump());
    report.digest = j.at("config_digest").get<std::string>();
    report.image_data = j.at("image_data").get<bool>();
    for (const json& s : j.at("per_seed")) report.per_seed.push_back(outcome_from_json(s));
    report.mean = outcome_from_json(j.at("mean"));
    report.stddev = outcome_from_json(j.at("stddev"));
    report.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
    return report;
  } catch (const json::exception& e) {
    throw ConfigError("not a run report (" + path + "): " + e.what());
  }
}

SweepResult run_sweep(const ExperimentConfig& base) {
  if (!base.sweep) throw ConfigError("config has no sweep section");
  const std::string axis = base.sweep->axis;
  SweepResult result;
  std::ostringstream table;
  table << axis
        << "\tvfl_accuracy\tvfl_auc\tattack_overall\tattack_discrete\tattack_continuous"
           "\trandom_overall\n";
  for (double value : base.sweep->values) {
    ExperimentConfig cfg = base;
    cfg.sweep.reset();
    if (axis == "aux_ratio") {
      cfg.attack.aux_ratio = value;
    } else if (axis == "leak_count") {
      cfg.attack.leak_count = static_cast<Index>(std::llround(value));
    } else if (axis == "split_ratio") {
      cfg.split.feature_ratio = value;
    } else if (axis == "noise_ratio") {
      if (cfg.session.defense.kind == DefenseKind::None)
        throw ConfigError("noise_ratio sweep needs a defense kind in the config");
      cfg.session.defense.ratio = value;
    } else if (axis == "invernet_depth") {
      cfg.attack.invernet.depth = static_cast<int>(std::llround(value));
    } else {
      throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    validate_experiment_config(cfg);
    RunReport run = run_experiment(cfg);
    std::string vstr = format_value(value);
    std::string stem = "sweep-" + axis + "-" + vstr;
    for (char& c : stem)
      if (c == '.') c = 'p';
    write_report(run, stem);
    table << vstr << '\t' << format_value(run.mean.vfl_accuracy) << '\t'
          << format_value(run.mean.vfl_auc) << '\t' << format_value(run.mean.attack.overall)
          << '\t' << format_value(run.mean.attack.discrete) << '\t'
          << format_value(run.mean.attack.continuous) << '\t'
          << format_value(run.mean.random_guess.overall) << '\n';
    result.runs.push_back(std::move(run));
  }
  result.table = table.str();
  namespace fs = std::filesystem;
  fs::create_directories(base.out_dir);
  std::ofstream out(fs::path(base.out_dir) / ("sweep-" + axis + ".tsv"));
  out << result.table;
  return result;
}

std::string summary_table(const std::vector<RunReport>& runs) {
  auto dataset_rank = [](const std::string& name) {
    if (name == "bank-like") return 0;
    if (name == "income-like") return 1;
    if (name == "credit-like") return 2;
    return 3;
  };
  auto scenario_rank = [](Scenario s) { return static_cast<int>(s); };
  std::vector<const RunReport*> order;
  for (const RunReport& r : runs) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [&](const RunReport* a, const RunReport* b) {
    int da = dataset_rank(a->config.dataset.name), db = dataset_rank(b->config.dataset.name);
    if (da != db) return da < db;
    if (da == 3 && a->config.dataset.name != b->config.dataset.name)
      return a->config.dataset.name < b->config.dataset.name;
    return scenario_rank(a->config.attack.scenario) < scenario_rank(b->config.attack.scenario);
  });
  std::ostringstream table;
  table << "dataset\tscenario\tvfl_auc\tattack_overall\toverall_std\tattack_discrete"
           "\tattack_continuous\trandom_overall\n";
  for (const RunReport* r : order) {
    table << r->config.dataset.name << '\t' << to_string(r->config.attack.scenario) << '\t'
          << format_value(r->mean.vfl_auc) << '\t' << format_value(r->mean.attack.overall)
          << '\t' << format_value(r->stddev.attack.overall) << '\t'
          << format_value(r->mean.attack.discrete) << '\t'
          << format_value(r->mean.attack.continuous) << '\t'
          << format_value(r->mean.random_guess.overall) << '\n';
  }
  return table.str();
}

const char* library_version() { return "0.1.0"; }

}  // namespace vflsim
