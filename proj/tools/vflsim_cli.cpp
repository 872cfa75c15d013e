#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vflsim/harness/config.hpp"
#include "vflsim/harness/experiment.hpp"
#include "vflsim/io/checkpoint.hpp"
#include "vflsim/types.hpp"

namespace {

using namespace vflsim;

struct CommonArgs {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string scenario;
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_scenario) {
  sub->add_option("--config", args.config_path, "experiment config (json)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seeds, "run seeds, comma separated")->delimiter(',');
  sub->add_option("--out", args.out_dir, "output directory (overrides config)");
  if (with_scenario)
    sub->add_option("--scenario", args.scenario, "QA, DPA, IQA or SA (overrides config)");
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config_path);
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.scenario.empty()) cfg.attack.scenario = scenario_from_string(args.scenario);
  validate_experiment_config(cfg);
  return cfg;
}

std::string report_stem(const ExperimentConfig& cfg) {
  return cfg.dataset.name + "-" + to_string(cfg.attack.scenario);
}

void print_mean_line(const RunReport& r) {
  std::printf("%s %s: vfl acc %.4f auc %.4f | attack %.2f +- %.2f (disc %.2f, cont %.2f)"
              " | random %.2f | %.1fs\n",
              r.config.dataset.name.c_str(), to_string(r.config.attack.scenario).c_str(),
              r.mean.vfl_accuracy, r.mean.vfl_auc, r.mean.attack.overall,
              r.stddev.attack.overall, r.mean.attack.discrete, r.mean.attack.continuous,
              r.mean.random_guess.overall, r.wall_seconds);
  if (r.image_data)
    std::printf("  image: psnr %.2f dB, ssim %.3f (random ssim %.3f)\n", r.mean.psnr_db,
                r.mean.ssim, r.mean.random_ssim);
}

int run_train(const CommonArgs& args) {
  ExperimentConfig cfg = load_with_overrides(args);
  PreparedData data = prepare_data(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  for (std::uint64_t seed : cfg.seeds) {
    TrainResult tr;
    VflSession session = train_session(cfg, data, seed, &tr);
    std::string path = (std::filesystem::path(cfg.out_dir) /
                        ("checkpoint-" + cfg.dataset.name + "-seed" +
                         std::to_string(seed) + ".json"))
                           .string();
    save_session(session, path);
    std::printf("seed %llu: acc %.4f auc %.4f after %d epochs%s -> %s\n",
                static_cast<unsigned long long>(seed), tr.holdout_accuracy, tr.holdout_auc,
                tr.epochs_run, tr.early_stopped ? " (early stop)" : "", path.c_str());
  }
  return 0;
}

int run_attack_verb(const CommonArgs& args) {
  ExperimentConfig cfg = load_with_overrides(args);
  RunReport report = run_experiment(cfg);
  std::string path = write_report(report, report_stem(cfg));
  print_mean_line(report);
  std::printf("report: %s\n", path.c_str());
  return 0;
}

int run_sweep_verb(const CommonArgs& args) {
  ExperimentConfig cfg = load_with_overrides(args);
  if (!cfg.sweep) throw ConfigError("config has no sweep section");
  SweepResult result = run_sweep(cfg);
  std::fputs(result.table.c_str(), stdout);
  std::printf("%zu runs written to %s\n", result.runs.size(), cfg.out_dir.c_str());
  return 0;
}

int run_report_verb(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json" &&
        entry.path().filename().string().rfind("checkpoint-", 0) != 0)
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<RunReport> runs;
  for (const fs::path& p : paths) {
    try {
      runs.push_back(read_report(p.string()));
    } catch (const std::exception&) {
      // not a run report; skip
    }
  }
  if (runs.empty()) throw ConfigError("no run reports found in " + dir);
  std::fputs(summary_table(runs).c_str(), stdout);
  return 0;
}

int run_validate(const CommonArgs& args) {
  ExperimentConfig cfg = load_with_overrides(args);
  std::fputs(canonical_config_text(cfg).c_str(), stdout);
  std::printf("\ndigest: %s\n", config_digest(cfg).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vertical federated learning simulator and reconstruction-attack harness"};
  app.require_subcommand(1);

  CommonArgs train_args, attack_args, sweep_args, validate_args;
  std::string report_dir;

  CLI::App* train = app.add_subcommand("train", "train the split model and save checkpoints");
  add_common(train, train_args, false);
  CLI::App* attack =
      app.add_subcommand("attack", "train, run the configured attack, write a report");
  add_common(attack, attack_args, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run the config's sweep axis");
  add_common(sweep, sweep_args, true);
  CLI::App* report = app.add_subcommand("report", "summarize run reports in a directory");
  report->add_option("--out", report_dir, "directory holding run reports")->required();
  CLI::App* validate =
      app.add_subcommand("validate-config", "parse, check and echo the canonical config");
  add_common(validate, validate_args, true);

  try {
    app.parse(argc, argv);
    if (train->parsed()) return run_train(train_args);
    if (attack->parsed()) return run_attack_verb(attack_args);
    if (sweep->parsed()) return run_sweep_verb(sweep_args);
    if (report->parsed()) return run_report_verb(report_dir);
    if (validate->parsed()) return run_validate(validate_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const vflsim::CapabilityViolation& e) {
    std::fprintf(stderr, "capability violation: %s\n", e.what());
    return 4;
  } catch (const vflsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const vflsim::DivergenceError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
