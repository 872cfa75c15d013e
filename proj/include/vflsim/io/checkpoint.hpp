#pragma once

#include <string>
#include <vector>

#include "vflsim/vfl/session.hpp"

namespace vflsim {

// Versioned JSON dump of a session's mutable state: config, row split, every
// model's parameters, optimizer moments, query counters/budgets, and the
// defense/shuffle rng streams.  Feature views and labels are NOT stored (they
// belong to the dataset, not the session); load_session takes them again and
// validates dimensional consistency.  A round trip resumes training or attack
// runs bitwise.
void save_session(const VflSession& session, const std::string& path);
VflSession load_session(const std::string& path, std::vector<EncodedDataset> views,
                        std::vector<int> labels);

}  // namespace vflsim
