#pragma once

#include <map>
#include <optional>
#include <vector>

#include "vflsim/data/dataset.hpp"
#include "vflsim/data/split.hpp"
#include "vflsim/defense/noise.hpp"
#include "vflsim/nn/loss.hpp"
#include "vflsim/nn/model.hpp"
#include "vflsim/nn/optimizer.hpp"

namespace vflsim {

enum class CaptureTag { DuringTraining, PostTraining };

// Latest intermediate-feature vector seen per row, keyed by row id.  This is
// what the label holder legitimately observes crossing the party boundary.
class CaptureLog {
 public:
  void record(int party, CaptureTag tag, std::int64_t row_id, const Vector& features);
  bool has(int party, CaptureTag tag, std::int64_t row_id) const;
  const Vector& get(int party, CaptureTag tag, std::int64_t row_id) const;
  std::size_t size(int party, CaptureTag tag) const;

 private:
  std::map<std::tuple<int, int, std::int64_t>, Vector> entries_;
};

struct SessionConfig {
  // Widths appended after each party's input width; last entry is the
  // intermediate feature width sent to the label holder.
  std::vector<Index> bottom_widths{300, 100, 100};
  // Hidden widths of the label holder's head; output width follows num_classes.
  std::vector<Index> top_hidden{100, 100};
  int num_classes = 2;
  TrainHyper hyper;  // batch size, learning rate, optimizer (iterations unused here)
  int epochs = 30;
  // Stop after this many epochs without holdout-AUC improvement; <= 0 disables.
  int patience = 5;
  DefenseConfig defense;
  int target_party = 1;  // party whose features are attacked / defended
  bool record_training_captures = false;
  // With recording on, only the first this-many epochs land in the log (an
  // interceptor taps the channel from the start, not forever); <= 0 keeps
  // every epoch.  Manual train_step calls count as epoch 0.
  int capture_window_epochs = 1;
  std::uint64_t seed = 0;
};

struct Party {
  int index = 0;
  EncodedDataset view;  // all rows; training/holdout selection lives in the session
  Model bottom;
  OptimizerState opt;
};

struct ForwardRound {
  std::vector<Matrix> party_features;  // post-defense, as received by the label holder
  Matrix concat;
  std::vector<Tape> bottom_tapes;
  Tape top_tape;
  Matrix prediction;
};

struct BackwardRound {
  double loss = 0.0;
  // dL/dH per party, after any gradient defense — what each party receives.
  std::vector<Matrix> partial_feature_grads;
  Gradients top_grads;
  std::vector<Gradients> bottom_grads;
};

struct TrainResult {
  int epochs_run = 0;
  bool early_stopped = false;
  double final_loss = 0.0;
  double holdout_auc = 0.0;
  double holdout_accuracy = 0.0;
  std::vector<double> epoch_losses;
  std::vector<double> epoch_aucs;
};

// One federated training group: party 0 holds the labels and the top model,
// every party holds a feature view and a bottom model.
class VflSession {
 public:
  static VflSession build(std::vector<EncodedDataset> views, std::vector<int> labels,
                          RowSplit rows, SessionConfig cfg);

  // Full training loop with per-epoch holdout evaluation and early stopping.
  // Throws DivergenceError when the loss stops being finite.
  TrainResult train();

  // Single round on explicit row positions (also the loop's building blocks).
  ForwardRound forward_round(const std::vector<Index>& positions);
  BackwardRound backward_round(const ForwardRound& fwd, const std::vector<Index>& positions);
  double train_step(const std::vector<Index>& positions);

  // Eval-mode predictions for the label holder (defense noise still applies to
  // the target party's outbound features, as it would in deployment).
  Matrix predict(const std::vector<Index>& positions);
  double holdout_auc();
  double holdout_accuracy();

  // The attacker-facing query interface: Eval forward of crafted rows through
  // one party's bottom model.  Counts against that party's budget.
  Matrix query_party(int party, const Matrix& encoded_rows);
  void set_query_budget(int party, long budget);  // negative = unlimited
  long query_count(int party) const;

  // Records the features the given party sends for these rows.
  void capture_features(int party, const std::vector<Index>& positions, CaptureTag tag);
  Matrix captured_features(int party, const std::vector<Index>& positions,
                           CaptureTag tag) const;
  const CaptureLog& capture_log() const { return captures_; }

  int parties() const { return static_cast<int>(parties_.size()); }
  const EncodedDataset& view(int party) const { return party_at(party).view; }
  const Model& bottom(int party) const { return party_at(party).bottom; }
  Model& mutable_bottom(int party) { return party_at(party).bottom; }
  const Model& top() const { return top_; }
  Model& mutable_top() { return top_; }
  const std::vector<Index>& train_rows() const { return rows_.train; }
  const std::vector<Index>& holdout_rows() const { return rows_.holdout; }
  const std::vector<int>& labels() const { return labels_; }
  const SessionConfig& config() const { return cfg_; }
  int target_party() const { return cfg_.target_party; }

 private:
  friend void save_session(const VflSession&, const std::string&);
  friend VflSession load_session(const std::string&, std::vector<EncodedDataset>,
                                 std::vector<int>);

  VflSession() = default;
  const Party& party_at(int p) const;
  Party& party_at(int p);
  Matrix target_outbound(int party, const Matrix& features);
  Matrix labels_for(const std::vector<Index>& positions) const;

  SessionConfig cfg_;
  std::vector<Party> parties_;
  Model top_;
  OptimizerState top_opt_;
  std::vector<int> labels_;
  RowSplit rows_;
  CaptureLog captures_;
  int current_epoch_ = 0;
  std::vector<long> query_counts_;
  std::vector<long> query_budgets_;  // -1 = unlimited
  RngStream defense_rng_{0};
  RngStream shuffle_rng_{0};
};

}  // namespace vflsim
