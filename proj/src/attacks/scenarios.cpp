#include "vflsim/attacks/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vflsim/nn/loss.hpp"

namespace vflsim {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::QueryAttack: return "QA";
    case Scenario::DataPassiveAttack: return "DPA";
    case Scenario::IsolatedQueryAttack: return "IQA";
    case Scenario::StealthAttack: return "SA";
  }
  return "QA";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "QA") return Scenario::QueryAttack;
  if (name == "DPA") return Scenario::DataPassiveAttack;
  if (name == "IQA") return Scenario::IsolatedQueryAttack;
  if (name == "SA") return Scenario::StealthAttack;
  throw ConfigError("unknown scenario '" + name + "' (expected QA, DPA, IQA or SA)");
}

AttackCapabilities capabilities_for(Scenario s) {
  AttackCapabilities caps;
  switch (s) {
    case Scenario::QueryAttack:
      caps.query_target = true;
      caps.auxiliary_data = true;
      break;
    case Scenario::DataPassiveAttack:
      caps.auxiliary_data = true;
      break;
    case Scenario::IsolatedQueryAttack:
      caps.query_target = true;
      break;
    case Scenario::StealthAttack:
      caps.leaked_pairs = true;
      break;
  }
  return caps;
}

AttackSurface::AttackSurface(VflSession& session, Scenario scenario)
    : session_(session),
      scenario_(scenario),
      caps_(capabilities_for(scenario)),
      target_(session.target_party()),
      baseline_queries_(session.query_count(session.target_party())) {
  // Budgets are absolute counts; capping at the current count blocks any new
  // query while leaving earlier runs on the same session out of the audit.
  if (!caps_.query_target) session_.set_query_budget(target_, baseline_queries_);
}

Matrix AttackSurface::observed_features(const std::vector<Index>& positions) const {
  return session_.captured_features(target_, positions, CaptureTag::PostTraining);
}

Matrix AttackSurface::observed_features_of(int party,
                                           const std::vector<Index>& positions) const {
  if (party == 0)
    throw std::invalid_argument("observed_features_of: party 0 is the attacker itself");
  return session_.captured_features(party, positions, CaptureTag::PostTraining);
}

Matrix AttackSurface::active_features(const std::vector<Index>& positions) const {
  const EncodedDataset& view = session_.view(0);
  Matrix x(static_cast<Index>(positions.size()), view.width());
  for (std::size_t i = 0; i < positions.size(); ++i)
    x.row(static_cast<Index>(i)) = view.features.row(positions[i]);
  return forward_eval(session_.bottom(0), x);
}

Matrix AttackSurface::query_target(const Matrix& encoded_rows) {
  if (!caps_.query_target)
    throw CapabilityViolation("scenario " + to_string(scenario_) +
                              " has no query access to the target party");
  return session_.query_party(target_, encoded_rows);
}

namespace {

AttackReport base_report(const AttackSurface& surface, const AttackInputs& in) {
  AttackReport r;
  r.scenario = surface.scenario();
  r.attacked_positions = in.attacked_positions;
  return r;
}

Matrix labels_matrix(const std::vector<int>& labels, int num_classes) {
  if (num_classes == 2) {
    Matrix y(static_cast<Index>(labels.size()), 1);
    for (std::size_t i = 0; i < labels.size(); ++i)
      y(static_cast<Index>(i), 0) = static_cast<double>(labels[i]);
    return y;
  }
  return one_hot_labels(labels, num_classes);
}

}  // namespace

AttackReport query_attack(AttackSurface& surface, const AttackInputs& in,
                          const AttackConfig& cfg) {
  if (in.aux.rows() == 0) throw ConfigError("query attack needs auxiliary rows");
  Matrix h_aux = surface.query_target(in.aux.features);
  InverNetConfig inv = cfg.invernet;
  inv.seed = RngStream(cfg.seed).split("invernet").seed();
  Model g = train_invernet(h_aux, in.aux.features, inv);

  AttackReport r = base_report(surface, in);
  r.invernet_pairs = h_aux.rows();
  r.reconstructed = reconstruct(g, surface.observed_features(in.attacked_positions));
  r.queries_used = surface.queries_used();
  return r;
}

Model train_shadow(AttackSurface& surface, const AttackInputs& in, const AttackConfig& cfg) {
  if (in.aux.rows() == 0) throw ConfigError("shadow training needs auxiliary rows");
  if (in.aux_labels.size() != static_cast<std::size_t>(in.aux.rows()))
    throw ConfigError("shadow training needs a label per auxiliary row");

  // Same architecture as the agreed bottom models, fed by the target's layout.
  ModelSpec spec;
  spec.layer_widths.push_back(in.aux.width());
  for (Index w : surface.bottom_architecture()) spec.layer_widths.push_back(w);
  spec.hidden_activation = Activation::ReLU;
  spec.output_activation = OutputActivation::None;

  RngStream rng(cfg.seed);
  Model shadow = init_model(spec, rng.split("shadow-init").seed());
  OptimizerState opt = make_optimizer_state(shadow);
  RngStream batch_rng = rng.split("shadow-batches");

  // Frozen context: every non-target slot carries that party's per-row
  // features for the auxiliary rows (the attacker's own slot through its real
  // bottom model, observed features for any other passive party), held fixed
  // while only the shadow's parameters move.  The shadow must then explain
  // each label jointly with the partner features the top model actually saw,
  // which is the same per-row constraint the real bottom model solved.
  int parties = surface.parties();
  int target = surface.target_slot();
  Index fw = surface.feature_width();
  Matrix frozen(in.aux.rows(), fw * parties);
  frozen.middleCols(0, fw) = surface.active_features(in.aux_positions);
  for (int p = 1; p < parties; ++p) {
    if (p == target) continue;
    frozen.middleCols(static_cast<Index>(p) * fw, fw) =
        surface.observed_features_of(p, in.aux_positions);
  }

  const Model& top = surface.top_model();
  Matrix y_all = labels_matrix(in.aux_labels, surface.num_classes());
  LossKind loss_kind =
      surface.num_classes() == 2 ? LossKind::BinaryCrossEntropy : LossKind::CrossEntropy;

  Index n = in.aux.rows();
  Index batch = std::min(cfg.shadow_hyper.batch_size, n);
  for (Index it = 0; it < cfg.shadow_hyper.iterations; ++it) {
    std::vector<Index> picks = batch_rng.sample_without_replacement(n, batch);
    Matrix x(batch, in.aux.width());
    Matrix context(batch, frozen.cols());
    Matrix y(batch, y_all.cols());
    for (Index i = 0; i < batch; ++i) {
      x.row(i) = in.aux.features.row(picks[static_cast<std::size_t>(i)]);
      context.row(i) = frozen.row(picks[static_cast<std::size_t>(i)]);
      y.row(i) = y_all.row(picks[static_cast<std::size_t>(i)]);
    }
    auto [h_shadow, shadow_tape] = forward(shadow, x);
    Matrix concat = context;
    concat.middleCols(static_cast<Index>(target) * fw, fw) = h_shadow;
    auto [pred, top_tape] = forward(top, concat);
    LossResult lr = loss_eval(loss_kind, pred, y);
    if (!std::isfinite(lr.value))
      throw DivergenceError("shadow training diverged at iteration " + std::to_string(it));
    Gradients top_grads = backward(top, top_tape, lr.gradient);
    Matrix upstream = top_grads.input_gradient.middleCols(static_cast<Index>(target) * fw, fw);
    Gradients shadow_grads = backward(shadow, shadow_tape, upstream);
    optimizer_step(shadow, shadow_grads, opt, cfg.shadow_hyper);
  }
  return shadow;
}

AttackReport data_passive_attack(AttackSurface& surface, const AttackInputs& in,
                                 const AttackConfig& cfg) {
  AttackReport r = base_report(surface, in);
  r.top_hash_before = parameter_hash(surface.top_model());
  Model shadow = train_shadow(surface, in, cfg);
  r.top_hash_after = parameter_hash(surface.top_model());

  Matrix h_shadow = forward_eval(shadow, in.aux.features);
  InverNetConfig inv = cfg.invernet;
  inv.seed = RngStream(cfg.seed).split("invernet").seed();
  Model g = train_invernet(h_shadow, in.aux.features, inv);

  r.invernet_pairs = h_shadow.rows();
  r.reconstructed = reconstruct(g, surface.observed_features(in.attacked_positions));
  r.queries_used = surface.queries_used();
  return r;
}

AttackReport isolated_query_attack(AttackSurface& surface, const AttackInputs& in,
                                   const AttackConfig& cfg) {
  if (cfg.fake_rows <= 0)
    throw ConfigError("isolated query attack needs a positive fake row count");
  RngStream rng(cfg.seed);
  EncodedDataset fake =
      cfg.schema_guided
          ? generate_fake(surface.target_schema(), cfg.fake_rows, rng.split("fake"))
          : generate_uniform_noise(surface.target_schema(), cfg.fake_rows, rng.split("fake"));
  Matrix h_fake = surface.query_target(fake.features);
  InverNetConfig inv = cfg.invernet;
  inv.seed = rng.split("invernet").seed();
  Model g = train_invernet(h_fake, fake.features, inv);

  AttackReport r = base_report(surface, in);
  r.invernet_pairs = h_fake.rows();
  r.reconstructed = reconstruct(g, surface.observed_features(in.attacked_positions));
  r.queries_used = surface.queries_used();
  return r;
}

AttackReport stealth_attack(AttackSurface& surface, const AttackInputs& in,
                            const AttackConfig& cfg) {
  if (in.leak.encoded_rows.rows() == 0) throw ConfigError("stealth attack needs leaked pairs");
  if (in.leak.encoded_rows.rows() != in.leak.features.rows())
    throw ConfigError("stealth attack: leaked inputs and features misaligned");
  InverNetConfig inv = cfg.invernet;
  inv.seed = RngStream(cfg.seed).split("invernet").seed();
  Model g = train_invernet(in.leak.features, in.leak.encoded_rows, inv);

  AttackReport r = base_report(surface, in);
  r.invernet_pairs = in.leak.features.rows();
  r.reconstructed = reconstruct(g, surface.observed_features(in.attacked_positions));
  r.queries_used = surface.queries_used();
  return r;
}

AttackReport run_attack(VflSession& session, const AttackConfig& in_cfg) {
  AttackConfig cfg = in_cfg;
  if (cfg.fake_rows <= 0)  // default: one fake row per training row
    cfg.fake_rows = static_cast<Index>(session.train_rows().size());
  AttackCapabilities caps = capabilities_for(cfg.scenario);
  int target = session.target_party();
  RngStream rng(cfg.seed);

  AttackInputs in;
  in.attacked_positions = session.holdout_rows();

  if (caps.auxiliary_data) {
    const std::vector<Index>& holdout = session.holdout_rows();
    if (!(cfg.aux_ratio > 0.0 && cfg.aux_ratio <= 1.0))
      throw ConfigError("auxiliary ratio must lie in (0, 1], got " +
                        std::to_string(cfg.aux_ratio));
    Index n_aux = std::max<Index>(
        1, static_cast<Index>(
               std::floor(cfg.aux_ratio * static_cast<double>(holdout.size()))));
    std::vector<Index> picks =
        rng.split("aux").sample_without_replacement(static_cast<Index>(holdout.size()), n_aux);
    std::set<Index> aux_set;
    for (Index p : picks) {
      in.aux_positions.push_back(holdout[static_cast<std::size_t>(p)]);
      aux_set.insert(holdout[static_cast<std::size_t>(p)]);
    }
    in.aux = take_rows(session.view(target), in.aux_positions);
    for (Index pos : in.aux_positions)
      in.aux_labels.push_back(session.labels()[static_cast<std::size_t>(pos)]);

    std::vector<Index> attacked;
    for (Index pos : holdout)
      if (!aux_set.count(pos)) attacked.push_back(pos);
    if (attacked.empty()) attacked = holdout;  // aux consumed the whole pool
    in.attacked_positions = std::move(attacked);
  }

  if (caps.leaked_pairs) {
    in.leak.positions =
        sample_leak_positions(session.train_rows(), cfg.leak_count, rng.split("leak"));
    in.leak.encoded_rows = take_rows(session.view(target), in.leak.positions).features;
    // Leaked rows were used in training, so the features paired with them are
    // the ones that crossed the boundary during training, not fresh queries.
    if (session.capture_log().size(target, CaptureTag::DuringTraining) == 0)
      throw ConfigError(
          "leaked-pair attacks need features intercepted during training; "
          "train the session with record_training_captures enabled");
    in.leak.features =
        session.captured_features(target, in.leak.positions, CaptureTag::DuringTraining);
    for (Index pos : in.leak.positions)
      in.leak.row_ids.push_back(session.view(target).row_ids[static_cast<std::size_t>(pos)]);
  }

  // The attacked rows' features are protocol traffic the label holder has
  // already seen; materialize them so the attack can read them back.
  session.capture_features(target, in.attacked_positions, CaptureTag::PostTraining);
  if (caps.auxiliary_data && session.parties() > 2) {
    for (int p = 1; p < session.parties(); ++p)
      if (p != target) session.capture_features(p, in.aux_positions, CaptureTag::PostTraining);
  }

  // Exact query allowances: what the scenario premises, nothing more.  Budgets
  // are absolute, so extend from wherever the session's counter already is.
  long count_before = session.query_count(target);
  if (cfg.scenario == Scenario::QueryAttack)
    session.set_query_budget(target, count_before + static_cast<long>(in.aux.rows()));
  else if (cfg.scenario == Scenario::IsolatedQueryAttack)
    session.set_query_budget(target, count_before + cfg.fake_rows);

  AttackSurface surface(session, cfg.scenario);
  AttackReport report;
  switch (cfg.scenario) {
    case Scenario::QueryAttack: report = query_attack(surface, in, cfg); break;
    case Scenario::DataPassiveAttack: report = data_passive_attack(surface, in, cfg); break;
    case Scenario::IsolatedQueryAttack:
      report = isolated_query_attack(surface, in, cfg);
      break;
    case Scenario::StealthAttack: report = stealth_attack(surface, in, cfg); break;
  }

  report.attacked_fell_back_to_full_holdout =
      caps.auxiliary_data && report.attacked_positions.size() == session.holdout_rows().size();
  for (Index pos : report.attacked_positions)
    report.attacked_row_ids.push_back(
        session.view(target).row_ids[static_cast<std::size_t>(pos)]);

  if (!caps.query_target && session.query_count(target) != count_before)
    throw CapabilityViolation("scenario " + to_string(cfg.scenario) +
                              " issued queries it was not entitled to");
  return report;
}

}  // namespace vflsim
