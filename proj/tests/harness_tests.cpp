#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vflsim/harness/config.hpp"
#include "vflsim/harness/experiment.hpp"
#include "vflsim/harness/synthetic.hpp"
#include "vflsim/io/checkpoint.hpp"
#include "vflsim/types.hpp"

using namespace vflsim;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path.string();
}

// Small-but-real experiment: generated rows, short training, quick inverse net.
std::string tiny_config_text(const std::string& extra = "") {
  return R"({
    "spec_version": 1,
    "dataset": {"name": "bank-like", "rows": 300, "seed": 5},
    "split": {"feature_ratio": 0.5, "train_fraction": 0.8},
    "model": {"bottom_widths": [16, 8], "top_hidden": [8], "epochs": 2,
              "patience": 0, "batch_size": 32},
    "attack": {"scenario": "QA", "aux_ratio": 0.5,
               "invernet": {"depth": 1, "iterations": 200}},
    "seeds": [11])" +
         extra + "\n}";
}

ExperimentConfig tiny_config(const std::string& extra = "") {
  return parse_experiment_config(tiny_config_text(extra));
}

}  // namespace

TEST_CASE("config parsing fills defaults and rejects unknown keys") {
  ExperimentConfig cfg = parse_experiment_config(R"({"spec_version": 1})");
  CHECK(cfg.dataset.name == "bank-like");
  CHECK(cfg.dataset.rows == 10000);
  CHECK(cfg.split.parties == 2);
  CHECK(cfg.session.bottom_widths == std::vector<Index>{300, 100, 100});
  CHECK(cfg.session.capture_window_epochs == 1);
  CHECK(cfg.attack.scenario == Scenario::QueryAttack);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});

  CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"spec_version": 1, "nope": 2})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "dataset": {"rowz": 10}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "attack": {"scenario": "XX"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "model": {"optimizer": "lbfgs"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"spec_version": 99})"), ConfigError);
}

TEST_CASE("config validation catches out-of-range knobs") {
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "split": {"parties": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "split": {"train_fraction": 1.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "split": {"feature_ratio": 0.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "dataset": {"rows": 5}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "attack": {"aux_ratio": 1.5}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "attack": {"invernet": {"depth": 4}}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"spec_version": 1, "seeds": []})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_config(
          R"({"spec_version": 1, "sweep": {"axis": "sideways", "values": [1]}})"),
      ConfigError);
}

TEST_CASE("canonical config text round-trips and digests are value-sensitive") {
  ExperimentConfig cfg = tiny_config();
  std::string canon = canonical_config_text(cfg);
  ExperimentConfig again = parse_experiment_config(canon);
  CHECK(canonical_config_text(again) == canon);
  CHECK(config_digest(again) == config_digest(cfg));
  CHECK(config_digest(cfg).size() == 16);

  ExperimentConfig other = tiny_config();
  other.metric.epsilon = 0.25;
  CHECK(config_digest(other) != config_digest(cfg));
}

TEST_CASE("generated tabular datasets are deterministic and well formed") {
  for (const char* name : {"bank-like", "income-like", "credit-like"}) {
    CAPTURE(name);
    CHECK(is_synthetic_tabular_name(name));
    EncodedDataset a = make_synthetic_tabular(name, 400, 7);
    EncodedDataset b = make_synthetic_tabular(name, 400, 7);
    EncodedDataset c = make_synthetic_tabular(name, 400, 8);
    CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.labels == b.labels);
    CHECK((a.features - c.features).cwiseAbs().maxCoeff() > 0.0);

    CHECK(a.rows() == 400);
    CHECK(a.has_labels);
    CHECK(a.features.minCoeff() >= -1.0);
    CHECK(a.features.maxCoeff() <= 1.0);
    for (Index r = 0; r < a.rows(); ++r)
      CHECK(a.row_ids[static_cast<std::size_t>(r)] == r);

    // one-hot groups carry exactly one hot cell per row
    Index col = 0;
    for (const Column& cdef : a.schema.columns) {
      if (cdef.kind == ColumnKind::Categorical) {
        Index w = static_cast<Index>(cdef.categories.size());
        for (Index r = 0; r < a.rows(); ++r) {
          auto block = a.features.row(r).segment(col, w);
          CHECK(block.sum() == doctest::Approx(1.0));
          CHECK(block.maxCoeff() == 1.0);
          CHECK(block.minCoeff() == 0.0);
        }
        col += w;
      } else {
        ++col;
      }
    }
    CHECK(col == a.width());

    int ones = 0;
    for (int l : a.labels) ones += l;
    CHECK(ones > 0);
    CHECK(ones < 400);
  }
  CHECK_FALSE(is_synthetic_tabular_name("adult"));
  CHECK_THROWS_AS(make_synthetic_tabular("adult", 100, 1), ConfigError);
}

TEST_CASE("generated marginals are concentrated, not uniform") {
  EncodedDataset bank = make_synthetic_tabular("bank-like", 2000, 3);
  Index col = 0;
  for (const Column& cdef : bank.schema.columns) {
    if (cdef.kind != ColumnKind::Categorical) {
      ++col;
      continue;
    }
    Index w = static_cast<Index>(cdef.categories.size());
    Vector counts = bank.features.middleCols(col, w).colwise().sum();
    // the most common level dominates a uniform draw by a wide margin
    CHECK(counts.maxCoeff() / 2000.0 > 1.5 / static_cast<double>(w));
    col += w;
  }

  // tight central mass on the continuous side
  int in_band = 0, total = 0;
  col = 0;
  for (const Column& cdef : bank.schema.columns) {
    if (cdef.kind == ColumnKind::Categorical) {
      col += static_cast<Index>(cdef.categories.size());
      continue;
    }
    for (Index r = 0; r < bank.rows(); ++r) {
      ++total;
      if (std::abs(bank.features(r, col)) <= 0.4) ++in_band;
    }
    ++col;
  }
  CHECK(static_cast<double>(in_band) / total > 0.95);

  // credit-like continuous columns sit in two tight off-center clusters
  EncodedDataset credit = make_synthetic_tabular("credit-like", 2000, 3);
  int in_cluster = 0, positive = 0;
  total = 0;
  col = 0;
  for (const Column& cdef : credit.schema.columns) {
    if (cdef.kind == ColumnKind::Categorical) {
      col += static_cast<Index>(cdef.categories.size());
      continue;
    }
    for (Index r = 0; r < credit.rows(); ++r) {
      double v = credit.features(r, col);
      ++total;
      if (std::abs(v) > 0.45 && std::abs(v) < 0.75) ++in_cluster;
      if (v > 0.0) ++positive;
    }
    ++col;
  }
  CHECK(in_cluster == total);
  CHECK(static_cast<double>(positive) / total > 0.8);  // one cluster dominates
}

TEST_CASE("image rows flatten column-by-column with a side-dependent label") {
  EncodedDataset img = make_synthetic_image_dataset(16, 200, 9);
  CHECK(img.width() == 256);
  CHECK(img.rows() == 200);
  CHECK(img.features.minCoeff() >= -1.0);
  CHECK(img.features.maxCoeff() <= 1.0);

  EncodedDataset again = make_synthetic_image_dataset(16, 200, 9);
  CHECK((img.features - again.features).cwiseAbs().maxCoeff() == 0.0);

  // pixel columns are stored contiguously, so the trailing half of the feature
  // vector is the right half of the image; rows labeled 1 put their rectangle
  // (brighter than the background) there
  double right_mass_pos = 0.0, right_mass_neg = 0.0;
  int pos = 0, neg = 0;
  for (Index r = 0; r < img.rows(); ++r) {
    double right = img.features.row(r).tail(128).sum();
    if (img.labels[static_cast<std::size_t>(r)] == 1) {
      right_mass_pos += right;
      ++pos;
    } else {
      right_mass_neg += right;
      ++neg;
    }
  }
  CHECK(pos > 20);
  CHECK(neg > 20);
  CHECK(right_mass_pos / pos > right_mass_neg / neg);

  CHECK_THROWS_AS(make_synthetic_image_dataset(6, 50, 1), ConfigError);
}

TEST_CASE("session checkpoints round-trip bitwise") {
  ExperimentConfig cfg = tiny_config();
  PreparedData data = prepare_data(cfg);
  TrainResult tr;
  VflSession s = train_session(cfg, data, 11, &tr);
  CHECK(tr.epochs_run == 2);

  auto dir = fresh_dir("vflsim-harness-ckpt");
  std::string path = (dir / "session.json").string();
  save_session(s, path);

  VflSession loaded = load_session(path, data.views, data.full.labels);
  std::vector<Index> probe(s.holdout_rows().begin(), s.holdout_rows().begin() + 8);
  Matrix p1 = s.predict(probe);
  Matrix p2 = loaded.predict(probe);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);

  // the loaded copy steps to exactly the same place
  std::vector<Index> batch(s.train_rows().begin(), s.train_rows().begin() + 16);
  double l1 = s.train_step(batch);
  double l2 = loaded.train_step(batch);
  CHECK(l1 == l2);
  CHECK((s.predict(probe) - loaded.predict(probe)).cwiseAbs().maxCoeff() == 0.0);

  // attacks on two separately loaded copies agree bitwise
  VflSession c1 = load_session(path, data.views, data.full.labels);
  VflSession c2 = load_session(path, data.views, data.full.labels);
  AttackConfig atk = cfg.attack;
  atk.seed = 11;
  AttackReport r1 = run_attack(c1, atk);
  AttackReport r2 = run_attack(c2, atk);
  CHECK(r1.attacked_positions == r2.attacked_positions);
  CHECK((r1.reconstructed - r2.reconstructed).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.queries_used == r2.queries_used);

  CHECK_THROWS_AS(load_session(path, {}, {}), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment reports are identical apart from the timing block") {
  auto dir = fresh_dir("vflsim-harness-report");
  ExperimentConfig cfg = tiny_config(R"(, "out_dir": ")" + dir.string() + R"(")");

  RunReport a = run_experiment(cfg);
  RunReport b = run_experiment(cfg);
  CHECK(a.per_seed.size() == 1);
  CHECK(a.per_seed[0].seed == 11);
  CHECK(a.per_seed[0].vfl_auc == b.per_seed[0].vfl_auc);
  CHECK(a.per_seed[0].attack.overall == b.per_seed[0].attack.overall);
  CHECK(a.mean.attack.overall == a.per_seed[0].attack.overall);
  CHECK(a.stddev.attack.overall == 0.0);

  auto strip_timing = [](std::string text) {
    auto at = text.find("\"timing\"");
    REQUIRE(at != std::string::npos);
    auto end = text.find('}', at);
    return text.erase(at, end - at + 1);
  };
  CHECK(strip_timing(report_json(a)) == strip_timing(report_json(b)));

  std::string path = write_report(a, "roundtrip");
  RunReport back = read_report(path);
  CHECK(back.digest == a.digest);
  CHECK(back.per_seed.size() == 1);
  CHECK(back.per_seed[0].vfl_auc == a.per_seed[0].vfl_auc);
  CHECK(back.per_seed[0].attack.continuous == a.per_seed[0].attack.continuous);
  CHECK(back.mean.random_guess.overall == a.mean.random_guess.overall);

  std::string table = summary_table({a});
  CHECK(table.find("bank-like") != std::string::npos);
  CHECK(table.find("QA") != std::string::npos);

  std::string junk = write_text(dir / "junk.json", "{\"hello\": 1}");
  CHECK_THROWS_AS(read_report(junk), ConfigError);
  std::string broken = write_text(dir / "broken.json", "not json at all");
  CHECK_THROWS_AS(read_report(broken), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps run every value and write one report per point") {
  auto dir = fresh_dir("vflsim-harness-sweep");
  ExperimentConfig cfg = tiny_config(
      R"(, "out_dir": ")" + dir.string() +
      R"(", "sweep": {"axis": "invernet_depth", "values": [1, 2]})");

  SweepResult sw = run_sweep(cfg);
  CHECK(sw.runs.size() == 2);
  CHECK(sw.runs[0].config.attack.invernet.depth == 1);
  CHECK(sw.runs[1].config.attack.invernet.depth == 2);
  CHECK(std::filesystem::exists(dir / "sweep-invernet_depth-1.json"));
  CHECK(std::filesystem::exists(dir / "sweep-invernet_depth-2.json"));
  CHECK(std::filesystem::exists(dir / "sweep-invernet_depth.tsv"));
  CHECK(sw.table.find("invernet_depth") != std::string::npos);

  // a noise sweep without a configured defense has nothing to scale
  ExperimentConfig bad = tiny_config(
      R"(, "out_dir": ")" + dir.string() +
      R"(", "sweep": {"axis": "noise_ratio", "values": [0.5]})");
  CHECK_THROWS_AS(run_sweep(bad), ConfigError);
  std::filesystem::remove_all(dir);
}
