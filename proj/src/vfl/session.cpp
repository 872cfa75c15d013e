#include "vflsim/vfl/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "vflsim/metrics/metrics.hpp"

namespace vflsim {

void CaptureLog::record(int party, CaptureTag tag, std::int64_t row_id,
                        const Vector& features) {
  entries_[{party, static_cast<int>(tag), row_id}] = features;
}

bool CaptureLog::has(int party, CaptureTag tag, std::int64_t row_id) const {
  return entries_.count({party, static_cast<int>(tag), row_id}) > 0;
}

const Vector& CaptureLog::get(int party, CaptureTag tag, std::int64_t row_id) const {
  auto it = entries_.find({party, static_cast<int>(tag), row_id});
  if (it == entries_.end())
    throw std::invalid_argument("CaptureLog: no entry for row " + std::to_string(row_id));
  return it->second;
}

std::size_t CaptureLog::size(int party, CaptureTag tag) const {
  std::size_t n = 0;
  for (const auto& [key, v] : entries_)
    if (std::get<0>(key) == party && std::get<1>(key) == static_cast<int>(tag)) ++n;
  return n;
}

const Party& VflSession::party_at(int p) const {
  if (p < 0 || p >= parties())
    throw std::invalid_argument("party index " + std::to_string(p) + " out of range");
  return parties_[static_cast<std::size_t>(p)];
}

Party& VflSession::party_at(int p) {
  if (p < 0 || p >= parties())
    throw std::invalid_argument("party index " + std::to_string(p) + " out of range");
  return parties_[static_cast<std::size_t>(p)];
}

VflSession VflSession::build(std::vector<EncodedDataset> views, std::vector<int> labels,
                             RowSplit rows, SessionConfig cfg) {
  if (views.size() < 2)
    throw ConfigError("a federated session needs at least 2 parties, got " +
                      std::to_string(views.size()));
  Index n = views.front().rows();
  for (const auto& v : views)
    if (v.rows() != n) throw ConfigError("party views disagree on row count");
  if (static_cast<Index>(labels.size()) != n)
    throw ConfigError("label count does not match view rows");
  if (cfg.num_classes < 2) throw ConfigError("num_classes must be at least 2");
  for (int y : labels)
    if (y < 0 || y >= cfg.num_classes)
      throw ConfigError("label " + std::to_string(y) + " outside [0, num_classes)");
  if (cfg.target_party < 1 || cfg.target_party >= static_cast<int>(views.size()))
    throw ConfigError("target party must name a passive party");
  if (cfg.bottom_widths.empty()) throw ConfigError("bottom_widths must not be empty");
  if (rows.train.empty() || rows.holdout.empty())
    throw ConfigError("train and holdout row lists must be non-empty");
  std::set<Index> seen;
  for (Index r : rows.train) seen.insert(r);
  for (Index r : rows.holdout)
    if (!seen.insert(r).second) throw ConfigError("train/holdout rows overlap");
  for (Index r : seen)
    if (r < 0 || r >= n) throw ConfigError("row position out of range");

  VflSession s;
  s.cfg_ = cfg;
  s.labels_ = std::move(labels);
  s.rows_ = std::move(rows);
  RngStream root(cfg.seed);

  Index feature_width = cfg.bottom_widths.back();
  for (std::size_t p = 0; p < views.size(); ++p) {
    Party party;
    party.index = static_cast<int>(p);
    party.view = std::move(views[p]);
    ModelSpec spec;
    spec.layer_widths.push_back(party.view.width());
    for (Index w : cfg.bottom_widths) spec.layer_widths.push_back(w);
    spec.hidden_activation = Activation::ReLU;
    spec.output_activation = OutputActivation::None;
    party.bottom = init_model(spec, root.split("bottom-" + std::to_string(p)).seed());
    party.opt = make_optimizer_state(party.bottom);
    s.parties_.push_back(std::move(party));
  }

  ModelSpec top_spec;
  top_spec.layer_widths.push_back(feature_width * static_cast<Index>(s.parties_.size()));
  for (Index w : cfg.top_hidden) top_spec.layer_widths.push_back(w);
  top_spec.layer_widths.push_back(cfg.num_classes == 2 ? 1 : cfg.num_classes);
  top_spec.hidden_activation = Activation::ReLU;
  top_spec.output_activation =
      cfg.num_classes == 2 ? OutputActivation::Sigmoid : OutputActivation::Softmax;
  s.top_ = init_model(top_spec, root.split("top").seed());
  s.top_opt_ = make_optimizer_state(s.top_);

  s.query_counts_.assign(s.parties_.size(), 0);
  s.query_budgets_.assign(s.parties_.size(), -1);
  s.defense_rng_ = root.split("defense");
  s.shuffle_rng_ = root.split("shuffle");
  return s;
}

Matrix VflSession::target_outbound(int party, const Matrix& features) {
  if (cfg_.defense.kind == DefenseKind::GaussianFeatureNoise && party == cfg_.target_party)
    return add_scaled_noise(features, cfg_.defense.ratio, defense_rng_);
  return features;
}

Matrix VflSession::labels_for(const std::vector<Index>& positions) const {
  if (cfg_.num_classes == 2) {
    Matrix y(static_cast<Index>(positions.size()), 1);
    for (std::size_t i = 0; i < positions.size(); ++i)
      y(static_cast<Index>(i), 0) =
          static_cast<double>(labels_[static_cast<std::size_t>(positions[i])]);
    return y;
  }
  std::vector<int> sel;
  sel.reserve(positions.size());
  for (Index p : positions) sel.push_back(labels_[static_cast<std::size_t>(p)]);
  return one_hot_labels(sel, cfg_.num_classes);
}

ForwardRound VflSession::forward_round(const std::vector<Index>& positions) {
  if (positions.empty()) throw std::invalid_argument("forward_round: empty batch");
  ForwardRound fr;
  Index n = static_cast<Index>(positions.size());
  Index fw = cfg_.bottom_widths.back();
  fr.concat = Matrix(n, fw * parties());
  for (int p = 0; p < parties(); ++p) {
    Party& party = party_at(p);
    Matrix x(n, party.view.width());
    for (Index i = 0; i < n; ++i)
      x.row(i) = party.view.features.row(positions[static_cast<std::size_t>(i)]);
    auto [h, tape] = forward(party.bottom, x);
    Matrix sent = target_outbound(p, h);
    bool in_window =
        cfg_.capture_window_epochs <= 0 || current_epoch_ < cfg_.capture_window_epochs;
    if (cfg_.record_training_captures && in_window && p == cfg_.target_party) {
      for (Index i = 0; i < n; ++i)
        captures_.record(p, CaptureTag::DuringTraining,
                         party.view.row_ids[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])],
                         sent.row(i).transpose());
    }
    fr.bottom_tapes.push_back(std::move(tape));
    fr.concat.middleCols(static_cast<Index>(p) * fw, fw) = sent;
    fr.party_features.push_back(std::move(sent));
  }
  auto [pred, top_tape] = forward(top_, fr.concat);
  fr.top_tape = std::move(top_tape);
  fr.prediction = std::move(pred);
  return fr;
}

BackwardRound VflSession::backward_round(const ForwardRound& fwd,
                                         const std::vector<Index>& positions) {
  Matrix y = labels_for(positions);
  LossKind kind =
      cfg_.num_classes == 2 ? LossKind::BinaryCrossEntropy : LossKind::CrossEntropy;
  LossResult lr = loss_eval(kind, fwd.prediction, y);

  BackwardRound br;
  br.loss = lr.value;
  br.top_grads = backward(top_, fwd.top_tape, lr.gradient);

  Index fw = cfg_.bottom_widths.back();
  for (int p = 0; p < parties(); ++p) {
    Matrix partial = br.top_grads.input_gradient.middleCols(static_cast<Index>(p) * fw, fw);
    // The gradient message crossing back to a passive party can be noised.
    if (cfg_.defense.kind == DefenseKind::DpGradientNoise && p != 0) {
      if (cfg_.defense.clip > 0.0) partial = clip_rows(partial, cfg_.defense.clip);
      partial = add_scaled_noise(partial, cfg_.defense.ratio, defense_rng_);
    }
    br.partial_feature_grads.push_back(partial);
    br.bottom_grads.push_back(
        backward(party_at(p).bottom, fwd.bottom_tapes[static_cast<std::size_t>(p)], partial));
  }
  return br;
}

double VflSession::train_step(const std::vector<Index>& positions) {
  ForwardRound fwd = forward_round(positions);
  BackwardRound back = backward_round(fwd, positions);
  optimizer_step(top_, back.top_grads, top_opt_, cfg_.hyper);
  for (int p = 0; p < parties(); ++p)
    optimizer_step(party_at(p).bottom, back.bottom_grads[static_cast<std::size_t>(p)],
                   party_at(p).opt, cfg_.hyper);
  return back.loss;
}

TrainResult VflSession::train() {
  TrainResult result;
  double best_auc = -1.0;
  int stale = 0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    current_epoch_ = epoch;
    std::vector<Index> order = rows_.train;
    RngStream epoch_rng = shuffle_rng_.split(static_cast<std::uint64_t>(epoch));
    epoch_rng.shuffle(order);

    double loss_sum = 0.0;
    long batches = 0;
    for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg_.hyper.batch_size)) {
      std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg_.hyper.batch_size));
      std::vector<Index> batch(order.begin() + static_cast<std::ptrdiff_t>(at),
                               order.begin() + static_cast<std::ptrdiff_t>(end));
      double loss = train_step(batch);
      if (!std::isfinite(loss))
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(batches));
      loss_sum += loss;
      ++batches;
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(batches));
    result.epochs_run = epoch + 1;

    double auc = holdout_auc();
    result.epoch_aucs.push_back(auc);
    if (cfg_.patience > 0) {
      if (auc > best_auc + 1e-4) {
        best_auc = auc;
        stale = 0;
      } else if (++stale >= cfg_.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }
  result.final_loss = result.epoch_losses.back();
  result.holdout_auc = holdout_auc();
  result.holdout_accuracy = holdout_accuracy();
  return result;
}

Matrix VflSession::predict(const std::vector<Index>& positions) {
  if (positions.empty()) throw std::invalid_argument("predict: empty positions");
  Index n = static_cast<Index>(positions.size());
  Index fw = cfg_.bottom_widths.back();
  Matrix concat(n, fw * parties());
  for (int p = 0; p < parties(); ++p) {
    Party& party = party_at(p);
    Matrix x(n, party.view.width());
    for (Index i = 0; i < n; ++i)
      x.row(i) = party.view.features.row(positions[static_cast<std::size_t>(i)]);
    party.bottom.mode = Mode::Eval;
    Matrix h = target_outbound(p, forward_eval(party.bottom, x));
    party.bottom.mode = Mode::Train;
    concat.middleCols(static_cast<Index>(p) * fw, fw) = h;
  }
  return forward_eval(top_, concat);
}

double VflSession::holdout_auc() {
  Matrix pred = predict(rows_.holdout);
  std::vector<int> y;
  y.reserve(rows_.holdout.size());
  for (Index p : rows_.holdout) y.push_back(labels_[static_cast<std::size_t>(p)]);
  if (cfg_.num_classes == 2) return roc_auc(y, pred.col(0));
  // one-vs-rest mean for the multiclass path
  double sum = 0.0;
  for (int c = 0; c < cfg_.num_classes; ++c) {
    std::vector<int> yc;
    yc.reserve(y.size());
    for (int v : y) yc.push_back(v == c ? 1 : 0);
    sum += roc_auc(yc, pred.col(c));
  }
  return sum / cfg_.num_classes;
}

double VflSession::holdout_accuracy() {
  Matrix pred = predict(rows_.holdout);
  std::vector<int> y;
  y.reserve(rows_.holdout.size());
  for (Index p : rows_.holdout) y.push_back(labels_[static_cast<std::size_t>(p)]);
  return classification_accuracy(y, pred);
}

Matrix VflSession::query_party(int party, const Matrix& encoded_rows) {
  Party& target = party_at(party);
  if (encoded_rows.cols() != target.view.width())
    throw std::invalid_argument("query_party: expected width " +
                                std::to_string(target.view.width()) + ", got " +
                                std::to_string(encoded_rows.cols()));
  if (encoded_rows.rows() == 0) throw std::invalid_argument("query_party: empty query");
  long budget = query_budgets_[static_cast<std::size_t>(party)];
  long& count = query_counts_[static_cast<std::size_t>(party)];
  if (budget >= 0 && count + encoded_rows.rows() > budget)
    throw CapabilityViolation("query budget exceeded for party " + std::to_string(party) +
                              ": budget " + std::to_string(budget) + ", already used " +
                              std::to_string(count) + ", requested " +
                              std::to_string(encoded_rows.rows()));
  count += encoded_rows.rows();
  target.bottom.mode = Mode::Eval;
  Matrix h = forward_eval(target.bottom, encoded_rows);
  target.bottom.mode = Mode::Train;
  return target_outbound(party, h);
}

void VflSession::set_query_budget(int party, long budget) {
  party_at(party);
  query_budgets_[static_cast<std::size_t>(party)] = budget;
}

long VflSession::query_count(int party) const {
  party_at(party);
  return query_counts_[static_cast<std::size_t>(party)];
}

void VflSession::capture_features(int party, const std::vector<Index>& positions,
                                  CaptureTag tag) {
  if (positions.empty()) return;
  Party& p = party_at(party);
  Index n = static_cast<Index>(positions.size());
  Matrix x(n, p.view.width());
  for (Index i = 0; i < n; ++i) {
    Index pos = positions[static_cast<std::size_t>(i)];
    if (pos < 0 || pos >= p.view.rows())
      throw std::invalid_argument("capture_features: position out of range");
    x.row(i) = p.view.features.row(pos);
  }
  p.bottom.mode = Mode::Eval;
  Matrix h = target_outbound(party, forward_eval(p.bottom, x));
  p.bottom.mode = Mode::Train;
  for (Index i = 0; i < n; ++i)
    captures_.record(party, tag,
                     p.view.row_ids[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])],
                     h.row(i).transpose());
}

Matrix VflSession::captured_features(int party, const std::vector<Index>& positions,
                                     CaptureTag tag) const {
  const Party& p = party_at(party);
  Matrix out(static_cast<Index>(positions.size()), cfg_.bottom_widths.back());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    std::int64_t id = p.view.row_ids[static_cast<std::size_t>(positions[i])];
    out.row(static_cast<Index>(i)) = captures_.get(party, tag, id).transpose();
  }
  return out;
}

}  // namespace vflsim
