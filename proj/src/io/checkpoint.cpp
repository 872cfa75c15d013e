#include "vflsim/io/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace vflsim {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return json(flat);
}

Matrix matrix_from_json(const json& j, Index rows, Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows * cols)
    throw ConfigError("checkpoint: " + what + " has wrong element count");
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = j[i++].get<double>();
  return m;
}

json vector_to_json(const Vector& v) {
  std::vector<double> flat(v.data(), v.data() + v.size());
  return json(flat);
}

Vector vector_from_json(const json& j, Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    throw ConfigError("checkpoint: " + what + " has wrong element count");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

std::string activation_name(Activation a) { return a == Activation::ReLU ? "relu" : "none"; }

Activation activation_from(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "none") return Activation::None;
  throw ConfigError("checkpoint: unknown hidden activation '" + s + "'");
}

std::string output_name(OutputActivation a) {
  switch (a) {
    case OutputActivation::None: return "none";
    case OutputActivation::Sigmoid: return "sigmoid";
    case OutputActivation::Softmax: return "softmax";
  }
  return "none";
}

OutputActivation output_from(const std::string& s) {
  if (s == "none") return OutputActivation::None;
  if (s == "sigmoid") return OutputActivation::Sigmoid;
  if (s == "softmax") return OutputActivation::Softmax;
  throw ConfigError("checkpoint: unknown output activation '" + s + "'");
}

json model_to_json(const Model& m) {
  json j;
  j["layer_widths"] = m.spec.layer_widths;
  j["hidden_activation"] = activation_name(m.spec.hidden_activation);
  j["output_activation"] = output_name(m.spec.output_activation);
  json w = json::array(), b = json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    w.push_back(matrix_to_json(m.weights[l]));
    b.push_back(vector_to_json(m.biases[l]));
  }
  j["weights"] = std::move(w);
  j["biases"] = std::move(b);
  return j;
}

void model_params_from_json(const json& j, Model& m, const std::string& what) {
  std::vector<Index> widths = j.at("layer_widths").get<std::vector<Index>>();
  if (widths != m.spec.layer_widths)
    throw ConfigError("checkpoint: " + what + " layer widths do not match the session config");
  m.spec.hidden_activation = activation_from(j.at("hidden_activation").get<std::string>());
  m.spec.output_activation = output_from(j.at("output_activation").get<std::string>());
  const json& w = j.at("weights");
  const json& b = j.at("biases");
  if (w.size() != m.weights.size() || b.size() != m.biases.size())
    throw ConfigError("checkpoint: " + what + " has wrong layer count");
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    m.weights[l] = matrix_from_json(w[l], m.weights[l].rows(), m.weights[l].cols(),
                                    what + " weights");
    m.biases[l] = vector_from_json(b[l], m.biases[l].size(), what + " biases");
  }
}

json opt_to_json(const OptimizerState& s) {
  json j;
  j["step"] = s.step;
  json mw = json::array(), vw = json::array(), mb = json::array(), vb = json::array();
  for (std::size_t l = 0; l < s.m_w.size(); ++l) {
    mw.push_back(matrix_to_json(s.m_w[l]));
    vw.push_back(matrix_to_json(s.v_w[l]));
    mb.push_back(vector_to_json(s.m_b[l]));
    vb.push_back(vector_to_json(s.v_b[l]));
  }
  j["m_w"] = std::move(mw);
  j["v_w"] = std::move(vw);
  j["m_b"] = std::move(mb);
  j["v_b"] = std::move(vb);
  return j;
}

void opt_from_json(const json& j, OptimizerState& s, const std::string& what) {
  s.step = j.at("step").get<long>();
  const json& mw = j.at("m_w");
  const json& vw = j.at("v_w");
  const json& mb = j.at("m_b");
  const json& vb = j.at("v_b");
  if (mw.size() != s.m_w.size())
    throw ConfigError("checkpoint: " + what + " optimizer has wrong layer count");
  for (std::size_t l = 0; l < s.m_w.size(); ++l) {
    s.m_w[l] = matrix_from_json(mw[l], s.m_w[l].rows(), s.m_w[l].cols(), what + " m_w");
    s.v_w[l] = matrix_from_json(vw[l], s.v_w[l].rows(), s.v_w[l].cols(), what + " v_w");
    s.m_b[l] = vector_from_json(mb[l], s.m_b[l].size(), what + " m_b");
    s.v_b[l] = vector_from_json(vb[l], s.v_b[l].size(), what + " v_b");
  }
}

json config_to_json(const SessionConfig& c) {
  json j;
  j["bottom_widths"] = c.bottom_widths;
  j["top_hidden"] = c.top_hidden;
  j["num_classes"] = c.num_classes;
  j["batch_size"] = c.hyper.batch_size;
  j["iterations"] = c.hyper.iterations;
  j["learning_rate"] = c.hyper.learning_rate;
  j["optimizer"] = c.hyper.optimizer.kind == OptimizerKind::Adam ? "adam" : "sgd";
  j["beta1"] = c.hyper.optimizer.beta1;
  j["beta2"] = c.hyper.optimizer.beta2;
  j["epsilon"] = c.hyper.optimizer.epsilon;
  j["epochs"] = c.epochs;
  j["patience"] = c.patience;
  j["defense_kind"] = to_string(c.defense.kind);
  j["defense_ratio"] = c.defense.ratio;
  j["defense_clip"] = c.defense.clip;
  j["target_party"] = c.target_party;
  j["record_training_captures"] = c.record_training_captures;
  j["capture_window_epochs"] = c.capture_window_epochs;
  j["seed"] = c.seed;
  return j;
}

SessionConfig config_from_json(const json& j) {
  SessionConfig c;
  c.bottom_widths = j.at("bottom_widths").get<std::vector<Index>>();
  c.top_hidden = j.at("top_hidden").get<std::vector<Index>>();
  c.num_classes = j.at("num_classes").get<int>();
  c.hyper.batch_size = j.at("batch_size").get<Index>();
  c.hyper.iterations = j.at("iterations").get<Index>();
  c.hyper.learning_rate = j.at("learning_rate").get<double>();
  std::string opt = j.at("optimizer").get<std::string>();
  if (opt == "adam")
    c.hyper.optimizer.kind = OptimizerKind::Adam;
  else if (opt == "sgd")
    c.hyper.optimizer.kind = OptimizerKind::SGD;
  else
    throw ConfigError("checkpoint: unknown optimizer '" + opt + "'");
  c.hyper.optimizer.beta1 = j.at("beta1").get<double>();
  c.hyper.optimizer.beta2 = j.at("beta2").get<double>();
  c.hyper.optimizer.epsilon = j.at("epsilon").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.defense.kind = defense_kind_from_string(j.at("defense_kind").get<std::string>());
  c.defense.ratio = j.at("defense_ratio").get<double>();
  c.defense.clip = j.at("defense_clip").get<double>();
  c.target_party = j.at("target_party").get<int>();
  c.record_training_captures = j.at("record_training_captures").get<bool>();
  c.capture_window_epochs = j.at("capture_window_epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_session(const VflSession& session, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["config"] = config_to_json(session.cfg_);
  j["train_rows"] = session.rows_.train;
  j["holdout_rows"] = session.rows_.holdout;
  j["query_counts"] = session.query_counts_;
  j["query_budgets"] = session.query_budgets_;
  j["defense_rng"] = session.defense_rng_.serialize();
  j["shuffle_rng"] = session.shuffle_rng_.serialize();
  j["top"] = model_to_json(session.top_);
  j["top_opt"] = opt_to_json(session.top_opt_);
  json parties = json::array();
  for (const Party& p : session.parties_) {
    json pj;
    pj["bottom"] = model_to_json(p.bottom);
    pj["opt"] = opt_to_json(p.opt);
    parties.push_back(std::move(pj));
  }
  j["parties"] = std::move(parties);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out << j.dump();
  out << "\n";
  if (!out) throw ConfigError("failed while writing checkpoint: " + path);
}

VflSession load_session(const std::string& path, std::vector<EncodedDataset> views,
                        std::vector<int> labels) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  int version = j.at("format_version").get<int>();
  if (version != kFormatVersion)
    throw ConfigError("checkpoint format version " + std::to_string(version) +
                      " unsupported (expected " + std::to_string(kFormatVersion) + ")");

  SessionConfig cfg = config_from_json(j.at("config"));
  RowSplit rows;
  rows.train = j.at("train_rows").get<std::vector<Index>>();
  rows.holdout = j.at("holdout_rows").get<std::vector<Index>>();

  VflSession session = VflSession::build(std::move(views), std::move(labels), rows, cfg);

  model_params_from_json(j.at("top"), session.top_, "top model");
  opt_from_json(j.at("top_opt"), session.top_opt_, "top model");
  const json& parties = j.at("parties");
  if (static_cast<int>(parties.size()) != session.parties())
    throw ConfigError("checkpoint: party count does not match the provided views");
  for (int p = 0; p < session.parties(); ++p) {
    Party& party = session.parties_[static_cast<std::size_t>(p)];
    std::string what = "party " + std::to_string(p) + " bottom";
    model_params_from_json(parties[static_cast<std::size_t>(p)].at("bottom"), party.bottom,
                           what);
    opt_from_json(parties[static_cast<std::size_t>(p)].at("opt"), party.opt, what);
  }
  session.query_counts_ = j.at("query_counts").get<std::vector<long>>();
  session.query_budgets_ = j.at("query_budgets").get<std::vector<long>>();
  if (session.query_counts_.size() != static_cast<std::size_t>(session.parties()) ||
      session.query_budgets_.size() != static_cast<std::size_t>(session.parties()))
    throw ConfigError("checkpoint: query bookkeeping does not match the party count");
  session.defense_rng_ = RngStream::deserialize(j.at("defense_rng").get<std::string>());
  session.shuffle_rng_ = RngStream::deserialize(j.at("shuffle_rng").get<std::string>());
  return session;
}

}  // namespace vflsim
