#include "gala/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "gala/datagen.hpp"
#include "gala/io.hpp"
#include "gala/rng.hpp"

namespace gala {

namespace {

ModelState zeros_like(const ModelState& m) {
  ModelState z;
  if (m.has_hidden()) {
    z.hidden_weights = Matrix(m.hidden_weights.rows(), m.hidden_weights.cols());
    z.hidden_bias.assign(m.hidden_bias.size(), 0.0);
  }
  z.last_weights = Matrix(m.last_weights.rows(), m.last_weights.cols());
  z.last_bias.assign(m.last_bias.size(), 0.0);
  return z;
}

// Applies f(a_i, b_i) to every parameter pair.
template <class F>
void zip_params(ModelState& a, const ModelState& b, F f) {
  auto zip = [&](std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) f(x[i], y[i]);
  };
  zip(a.hidden_weights.data(), b.hidden_weights.data());
  zip(a.hidden_bias, b.hidden_bias);
  zip(a.last_weights.data(), b.last_weights.data());
  zip(a.last_bias, b.last_bias);
}

struct Workspace {
  std::vector<double> pre, feature, logits, dlogits, dfeature;
  explicit Workspace(const ModelState& m)
      : pre(m.has_hidden() ? m.hidden_weights.cols() : 0),
        feature(m.feature_dim()),
        logits(m.n_classes()),
        dlogits(m.n_classes()),
        dfeature(m.feature_dim()) {}
};

// Adds weight * dCE/dtheta of one row into grad; returns the row's CE.
double accumulate_row(const ModelState& m, std::span<const double> x, int label, double weight, ModelState& grad,
                      Workspace& ws) {
  if (m.has_hidden()) {
    const auto& w = m.hidden_weights;
    const std::size_t h = w.cols();
    for (std::size_t j = 0; j < h; ++j) ws.pre[j] = m.hidden_bias[j];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const auto wr = w.row(i);
      for (std::size_t j = 0; j < h; ++j) ws.pre[j] += x[i] * wr[j];
    }
    for (std::size_t j = 0; j < h; ++j) ws.feature[j] = std::max(0.0, ws.pre[j]);
  } else {
    std::copy(x.begin(), x.end(), ws.feature.begin());
  }
  const auto& w = m.last_weights;
  const std::size_t c = w.cols();
  for (std::size_t k = 0; k < c; ++k) ws.logits[k] = m.last_bias[k];
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto wr = w.row(i);
    for (std::size_t k = 0; k < c; ++k) ws.logits[k] += ws.feature[i] * wr[k];
  }
  const double mx = *std::max_element(ws.logits.begin(), ws.logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) sum += std::exp(ws.logits[k] - mx);
  const double lse = mx + std::log(sum);
  const double loss = lse - ws.logits[label];

  for (std::size_t k = 0; k < c; ++k) {
    const double p = std::exp(ws.logits[k] - lse);
    ws.dlogits[k] = weight * (p - (static_cast<int>(k) == label ? 1.0 : 0.0));
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto gr = grad.last_weights.row(i);
    for (std::size_t k = 0; k < c; ++k) gr[k] += ws.feature[i] * ws.dlogits[k];
  }
  for (std::size_t k = 0; k < c; ++k) grad.last_bias[k] += ws.dlogits[k];

  if (m.has_hidden()) {
    const std::size_t h = m.hidden_weights.cols();
    for (std::size_t j = 0; j < h; ++j) {
      double s = 0.0;
      const auto wr = w.row(j);
      for (std::size_t k = 0; k < c; ++k) s += wr[k] * ws.dlogits[k];
      ws.dfeature[j] = ws.pre[j] > 0.0 ? s : 0.0;
    }
    for (std::size_t i = 0; i < m.hidden_weights.rows(); ++i) {
      auto gr = grad.hidden_weights.row(i);
      for (std::size_t j = 0; j < h; ++j) gr[j] += x[i] * ws.dfeature[j];
    }
    for (std::size_t j = 0; j < h; ++j) grad.hidden_bias[j] += ws.dfeature[j];
  }
  return loss;
}

std::vector<std::size_t> labeled_targets(const Dataset& ds, const LabeledPool& pool) {
  for (auto r : pool.selected()) {
    if (r >= ds.size()) throw Error(ErrorCode::BadId, "selected row out of range");
    if (ds.labels[r] == kUnlabeled)
      throw Error(ErrorCode::InvalidLabel, "selected target row " + std::to_string(r) + " has no label");
  }
  return pool.selected();
}

// Weighted mean CE over a row set, gradient accumulated into grad.
double accumulate_set(const ModelState& m, const Dataset& ds, std::span<const std::size_t> rows, double weight,
                      ModelState& grad, Workspace& ws) {
  if (rows.empty()) return 0.0;
  const double per_row = weight / static_cast<double>(rows.size());
  double loss = 0.0;
  for (auto r : rows) loss += accumulate_row(m, ds.features.row(r), ds.labels[r], per_row, grad, ws);
  return weight * loss / static_cast<double>(rows.size());
}

nlohmann::json layer_json(const Matrix& w, const std::vector<double>& b) {
  return {{"rows", w.rows()}, {"cols", w.cols()}, {"weights", w.data()}, {"bias", b}};
}

void layer_from_json(const nlohmann::json& j, Matrix& w, std::vector<double>& b) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("weights").get<std::vector<double>>();
  b = j.at("bias").get<std::vector<double>>();
  if (data.size() != rows * cols || b.size() != cols) throw Error(ErrorCode::Schema, "layer shape in checkpoint");
  w = Matrix(rows, cols);
  w.data() = std::move(data);
}

}  // namespace

void TrainConfig::validate(int rounds) const {
  if (epochs < 0) throw Error(ErrorCode::BadConfig, "epochs must be nonnegative");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::BadConfig, "learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorCode::BadConfig, "momentum must lie in [0, 1)");
  if (batch_size < 1) throw Error(ErrorCode::BadConfig, "batch_size must be positive");
  if (hidden_dim < 0) throw Error(ErrorCode::BadConfig, "hidden_dim must be nonnegative");
  if (!(target_loss_weight >= 0.0)) throw Error(ErrorCode::BadConfig, "target_loss_weight must be nonnegative");
  for (std::size_t i = 0; i < active_epochs.size(); ++i) {
    if (active_epochs[i] < 0 || active_epochs[i] >= epochs)
      throw Error(ErrorCode::BadConfig, "active epoch outside [0, epochs)");
    if (i > 0 && active_epochs[i] <= active_epochs[i - 1])
      throw Error(ErrorCode::BadConfig, "active epochs must be strictly increasing");
  }
  if (rounds >= 0 && static_cast<int>(active_epochs.size()) != rounds)
    throw Error(ErrorCode::BadConfig, "active_epochs has " + std::to_string(active_epochs.size()) +
                                          " entries but rounds = " + std::to_string(rounds));
}

std::vector<int> TrainConfig::even_schedule(int epochs, int rounds) {
  std::vector<int> out;
  const int start = epochs / 2;
  const int span = epochs - start;
  for (int r = 0; r < rounds; ++r) out.push_back(start + r * span / rounds);
  return out;
}

ModelState init_model(std::size_t input_dim, std::size_t hidden_dim, std::size_t n_classes, std::uint64_t seed) {
  Rng rng(mix_seed(seed, {0x6d6f64656cULL}));
  ModelState m;
  auto glorot = [&](Matrix& w) {
    const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (double& v : w.data()) v = rng.uniform(-a, a);
  };
  std::size_t f = input_dim;
  if (hidden_dim > 0) {
    m.hidden_weights = Matrix(input_dim, hidden_dim);
    glorot(m.hidden_weights);
    m.hidden_bias.assign(hidden_dim, 0.0);
    f = hidden_dim;
  }
  m.last_weights = Matrix(f, n_classes);
  glorot(m.last_weights);
  m.last_bias.assign(n_classes, 0.0);
  return m;
}

TrainResult train_epochs(ModelState model, const Dataset& ds, const LabeledPool& pool, const TrainConfig& cfg,
                         int from_epoch, int to_epoch, OptimizerState* state) {
  cfg.validate();
  validate_model(model);
  if (ds.dim() != model.input_dim()) throw Error(ErrorCode::ShapeMismatch, "dataset width does not match model");
  const std::vector<std::size_t> src0 = ds.source_rows();
  const std::vector<std::size_t> tgt0 = labeled_targets(ds, pool);
  std::vector<std::size_t> src = src0, tgt = tgt0;
  if (src0.empty() && tgt0.empty()) throw Error(ErrorCode::NoLabeledData, "no labeled rows to train on");

  TrainResult out{std::move(model), {}};
  if (from_epoch >= to_epoch) return out;

  OptimizerState local;
  OptimizerState& opt = state ? *state : local;
  if (!opt.initialized) {
    opt.velocity = zeros_like(out.model);
    opt.initialized = true;
  }

  const bool use_target = cfg.target_loss_weight != 0.0 && !tgt.empty();
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t lead = src.empty() ? tgt.size() : src.size();
  const std::size_t steps = std::max<std::size_t>(1, (lead + bs - 1) / bs);
  const std::size_t tchunk = (tgt.size() + steps - 1) / steps;

  Workspace ws(out.model);
  ModelState grad = zeros_like(out.model);
  for (int epoch = from_epoch; epoch < to_epoch; ++epoch) {
    // each epoch shuffles from the canonical order so runs can resume anywhere
    src = src0;
    tgt = tgt0;
    Rng src_rng(mix_seed(cfg.rng_seed, {static_cast<std::uint64_t>(epoch), 1}));
    src_rng.shuffle(src.begin(), src.end());
    if (use_target) {
      Rng tgt_rng(mix_seed(cfg.rng_seed, {static_cast<std::uint64_t>(epoch), 2}));
      tgt_rng.shuffle(tgt.begin(), tgt.end());
    }
    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      zip_params(grad, grad, [](double& g, double) { g = 0.0; });
      double loss = 0.0;
      if (!src.empty()) {
        const std::size_t lo = std::min(step * bs, src.size());
        const std::size_t hi = std::min(lo + bs, src.size());
        loss += accumulate_set(out.model, ds, std::span(src).subspan(lo, hi - lo), 1.0, grad, ws);
      }
      if (use_target) {
        const std::size_t lo = std::min(step * tchunk, tgt.size());
        const std::size_t hi = std::min(lo + tchunk, tgt.size());
        loss += accumulate_set(out.model, ds, std::span(tgt).subspan(lo, hi - lo), cfg.target_loss_weight, grad, ws);
      }
      const double mu = cfg.momentum;
      zip_params(opt.velocity, grad, [mu](double& v, double g) { v = mu * v + g; });
      const double lr = cfg.learning_rate;
      zip_params(out.model, opt.velocity, [lr](double& p, double v) { p -= lr * v; });
      epoch_loss += loss;
    }
    out.epoch_loss.push_back(epoch_loss / static_cast<double>(steps));
  }
  return out;
}

double training_loss(const ModelState& model, const Dataset& ds, const LabeledPool& pool, double target_weight) {
  ModelState grad = zeros_like(model);
  Workspace ws(model);
  const auto src = ds.source_rows();
  const auto tgt = labeled_targets(ds, pool);
  return accumulate_set(model, ds, src, 1.0, grad, ws) + accumulate_set(model, ds, tgt, target_weight, grad, ws);
}

ModelState training_gradient(const ModelState& model, const Dataset& ds, const LabeledPool& pool,
                             double target_weight) {
  ModelState grad = zeros_like(model);
  Workspace ws(model);
  const auto src = ds.source_rows();
  const auto tgt = labeled_targets(ds, pool);
  accumulate_set(model, ds, src, 1.0, grad, ws);
  accumulate_set(model, ds, tgt, target_weight, grad, ws);
  return grad;
}

double accuracy_on(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                   std::span<const int> labels, Exec exec) {
  if (rows.empty()) throw Error(ErrorCode::EmptyDomain, "no rows to evaluate");
  Matrix feats(rows.size(), model.feature_dim());
  Matrix probs(rows.size(), model.n_classes());
  kernels::forward_rows(model, inputs, rows, feats, probs, exec);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto p = probs.row(i);
    const auto top = std::max_element(p.begin(), p.end()) - p.begin();
    if (top == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double evaluate(const ModelState& model, const Dataset& ds, int domain, const AnswerKey* key, Exec exec) {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (auto r : ds.rows_in_domain(domain)) {
    int lab = ds.labels[r];
    if (domain == ds.target_domain() && key != nullptr) lab = key->label_of(r);
    if (lab == kUnlabeled) continue;
    rows.push_back(r);
    labels.push_back(lab);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyDomain, "domain " + std::to_string(domain) + " has no labeled rows");
  return accuracy_on(model, ds.features, rows, labels, exec);
}

nlohmann::json model_to_json(const ModelState& model) {
  nlohmann::json j;
  j["format"] = "gala.model/1";
  j["hidden"] = model.has_hidden() ? layer_json(model.hidden_weights, model.hidden_bias) : nlohmann::json(nullptr);
  j["activation"] = "relu";
  j["last"] = layer_json(model.last_weights, model.last_bias);
  return j;
}

ModelState model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "gala.model/1") throw Error(ErrorCode::Schema, "unsupported checkpoint format");
    ModelState m;
    if (!j.at("hidden").is_null()) layer_from_json(j.at("hidden"), m.hidden_weights, m.hidden_bias);
    layer_from_json(j.at("last"), m.last_weights, m.last_bias);
    validate_model(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("checkpoint: ") + e.what());
  }
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model).dump() + "\n");
}

ModelState load_model(const std::filesystem::path& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("checkpoint is not JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace gala
