#pragma once

#include <string>
#include <vector>

#include "vflsim/harness/config.hpp"
#include "vflsim/metrics/metrics.hpp"
#include "vflsim/vfl/session.hpp"

namespace vflsim {

// Dataset plus feature layout, shared by every seed of an experiment.
struct PreparedData {
  EncodedDataset full;
  FeatureAssignment assignment;
  std::vector<EncodedDataset> views;
  bool image = false;
  // Row-major dimensions of each stored target half-image.  The flattening is
  // pixel-column-major, so rows here are image columns; SSIM and PSNR are
  // invariant under that transpose.
  Index image_height = 0;
  Index image_width = 0;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

// Builds and trains one session for the given run seed (row split, model
// init, and batch order all derive from it).  Training captures are always
// recorded so leaked-pair attacks can run afterwards.
VflSession train_session(const ExperimentConfig& cfg, const PreparedData& data,
                         std::uint64_t seed, TrainResult* result = nullptr);

// Everything measured for one seed of one experiment.  Count-valued fields
// are stored as doubles so the per-seed, mean, and stddev slots share a type;
// per-seed values are always whole numbers.
struct SeedOutcome {
  std::uint64_t seed = 0;
  double vfl_accuracy = 0.0;
  double vfl_auc = 0.0;
  double epochs_run = 0.0;
  AccuracyTriple attack;        // cell-recovery rates of the reconstruction
  AccuracyTriple random_guess;  // same metric for schema-guided random rows
  double psnr_db = 0.0;         // image runs; zero otherwise
  double ssim = 0.0;
  double random_ssim = 0.0;
  double queries_used = 0.0;
  double invernet_pairs = 0.0;
  double attacked_rows = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  std::string digest;
  bool image_data = false;
  std::vector<SeedOutcome> per_seed;
  SeedOutcome mean;    // arithmetic mean over seeds
  SeedOutcome stddev;  // population standard deviation over seeds
  double wall_seconds = 0.0;
};

RunReport run_experiment(const ExperimentConfig& cfg);

// Report as JSON text.  Identical config + seeds give byte-identical output
// except for the single "timing" object, which holds all volatile values.
std::string report_json(const RunReport& report);

// Writes report_json to <config.out_dir>/<stem>.json (directories are
// created); returns the path.
std::string write_report(const RunReport& report, const std::string& stem);

// Parses a file written by write_report back into a RunReport (ConfigError on
// files that are not run reports).
RunReport read_report(const std::string& path);

struct SweepResult {
  std::vector<RunReport> runs;  // one per swept value, in value order
  std::string table;            // TSV summary, one row per value
};

// Runs config.sweep over its axis: each value patches a copy of the base
// config, runs it, and writes its report plus a combined sweep table.
SweepResult run_sweep(const ExperimentConfig& base);

// TSV of one row per report in the bundled-table preset order: datasets
// bank-like, income-like, credit-like (then others), scenarios QA, DPA, IQA,
// SA within each dataset.
std::string summary_table(const std::vector<RunReport>& runs);

const char* library_version();

}  // namespace vflsim
