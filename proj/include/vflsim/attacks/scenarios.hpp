#pragma once

#include <string>
#include <vector>

#include "vflsim/attacks/invernet.hpp"
#include "vflsim/data/sampling.hpp"
#include "vflsim/vfl/session.hpp"

namespace vflsim {

enum class Scenario { QueryAttack, DataPassiveAttack, IsolatedQueryAttack, StealthAttack };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// What each scenario is allowed to touch.
struct AttackCapabilities {
  bool query_target = false;
  bool auxiliary_data = false;
  bool leaked_pairs = false;
};
AttackCapabilities capabilities_for(Scenario s);

// The label holder's view of the protocol, as exposed to the attack code.
// Deliberately narrow: the attacker's own models and data, the target's public
// column layout, features observed crossing the boundary, and (when the
// scenario permits) the query interface.  There is no accessor for any passive
// party's parameters, and scenarios without query rights get a zero budget
// installed so even a buggy attack path cannot query.
class AttackSurface {
 public:
  AttackSurface(VflSession& session, Scenario scenario);

  Scenario scenario() const { return scenario_; }
  const AttackCapabilities& capabilities() const { return caps_; }

  const Model& top_model() const { return session_.top(); }
  const Model& active_bottom() const { return session_.bottom(0); }
  const EncodedDataset& active_view() const { return session_.view(0); }
  const Schema& target_schema() const { return session_.view(target_).schema; }
  Index target_input_width() const { return session_.view(target_).width(); }
  Index feature_width() const { return session_.config().bottom_widths.back(); }
  int parties() const { return session_.parties(); }
  int target_slot() const { return target_; }
  int num_classes() const { return session_.config().num_classes; }
  // Hidden widths every bottom model was agreed to use (protocol config).
  const std::vector<Index>& bottom_architecture() const {
    return session_.config().bottom_widths;
  }

  // Features the target sent for these rows (post-training protocol traffic).
  Matrix observed_features(const std::vector<Index>& positions) const;
  // Same for another passive party (multi-party setups).
  Matrix observed_features_of(int party, const std::vector<Index>& positions) const;
  // The attacker runs its own bottom model on its own rows at will.
  Matrix active_features(const std::vector<Index>& positions) const;

  // Capability-gated query to the target party's bottom model.
  Matrix query_target(const Matrix& encoded_rows);
  // Queries issued through this surface (prior runs on the session excluded).
  long queries_used() const { return session_.query_count(target_) - baseline_queries_; }

 private:
  VflSession& session_;
  Scenario scenario_;
  AttackCapabilities caps_;
  int target_;
  long baseline_queries_;
};

struct AttackConfig {
  Scenario scenario = Scenario::QueryAttack;
  double aux_ratio = 0.25;     // QueryAttack / DataPassiveAttack
  Index fake_rows = 0;         // IsolatedQueryAttack; <=0 means one per training row
  bool schema_guided = true;   // false: uniform-noise queries instead of the generator
  Index leak_count = 64;       // StealthAttack
  InverNetConfig invernet;
  TrainHyper shadow_hyper{64, 3000, 1e-3, {}};
  std::uint64_t seed = 0;
};

struct AttackInputs {
  std::vector<Index> attacked_positions;
  std::vector<Index> aux_positions;  // rows backing `aux`, when auxiliary data exists
  EncodedDataset aux;
  std::vector<int> aux_labels;  // DataPassiveAttack
  LeakSet leak;                 // StealthAttack
};

struct AttackReport {
  Scenario scenario = Scenario::QueryAttack;
  Matrix reconstructed;  // raw inverse-net output for the attacked rows
  std::vector<Index> attacked_positions;
  std::vector<std::int64_t> attacked_row_ids;
  long queries_used = 0;
  Index invernet_pairs = 0;
  bool attacked_fell_back_to_full_holdout = false;
  // Freeze audit for the shadow path: both hashes are set and must match.
  std::uint64_t top_hash_before = 0;
  std::uint64_t top_hash_after = 0;
};

// The four scenario implementations.  They see only the AttackSurface.
AttackReport query_attack(AttackSurface& surface, const AttackInputs& in,
                          const AttackConfig& cfg);
AttackReport data_passive_attack(AttackSurface& surface, const AttackInputs& in,
                                 const AttackConfig& cfg);
AttackReport isolated_query_attack(AttackSurface& surface, const AttackInputs& in,
                                   const AttackConfig& cfg);
AttackReport stealth_attack(AttackSurface& surface, const AttackInputs& in,
                            const AttackConfig& cfg);

// Shadow bottom model trained through the attacker's frozen top model on
// auxiliary rows; only the shadow's parameters move.
Model train_shadow(AttackSurface& surface, const AttackInputs& in, const AttackConfig& cfg);

// Simulator-side choreography: materializes the protocol artifacts the
// scenario premises (captures, auxiliary sample, leaked pairs), installs query
// budgets, dispatches, and audits the outcome.
AttackReport run_attack(VflSession& session, const AttackConfig& cfg);

}  // namespace vflsim
