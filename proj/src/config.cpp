#include "gala/config.hpp"

#include <algorithm>
#include <functional>

#include "gala/io.hpp"

namespace gala {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

template <class F>
auto as(const std::string& key, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadConfig, "bad value for '" + key + "': " + value);
  }
}

double to_double(const std::string& k, const std::string& v) {
  return as(k, v, [](const std::string& s) { return parse_double(s); });
}

int to_int(const std::string& k, const std::string& v) {
  return static_cast<int>(as(k, v, [](const std::string& s) { return parse_int(s); }));
}

std::uint64_t to_seed(const std::string& k, const std::string& v) {
  const long long x = as(k, v, [](const std::string& s) { return parse_int(s); });
  if (x < 0) throw Error(ErrorCode::BadConfig, "'" + k + "' must be nonnegative");
  return static_cast<std::uint64_t>(x);
}

bool to_bool(const std::string& k, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::BadConfig, "bad value for '" + k + "': " + v);
}

template <class T>
std::vector<T> to_list(const std::string& k, const std::string& v,
                       const std::function<T(const std::string&, const std::string&)>& item) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    const auto part = trim(std::string_view(v).substr(start, comma - start));
    if (!part.empty()) out.push_back(item(k, std::string(part)));
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::BadConfig, "'" + k + "' is empty");
  return out;
}

// Seeds accept "a..b" as an inclusive range.
std::vector<std::uint64_t> to_seeds(const std::string& k, const std::string& v) {
  const auto dots = v.find("..");
  if (dots == std::string::npos) return to_list<std::uint64_t>(k, v, to_seed);
  const auto lo = to_seed(k, std::string(trim(std::string_view(v).substr(0, dots))));
  const auto hi = to_seed(k, std::string(trim(std::string_view(v).substr(dots + 2))));
  if (hi < lo) throw Error(ErrorCode::BadConfig, "'" + k + "' range is reversed");
  std::vector<std::uint64_t> out;
  for (auto s = lo; s <= hi; ++s) out.push_back(s);
  return out;
}

template <class F>
auto enum_value(const std::string& k, const std::string& v, F&& parse) {
  try {
    return parse(v);
  } catch (const Error&) {
    throw Error(ErrorCode::BadConfig, "bad value for '" + k + "': " + v);
  }
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"sources", "3", "number of source domains"},
      {"samples_per_domain", "2000", "rows generated per domain"},
      {"classes", "5", "number of classes"},
      {"dim", "16", "feature dimension"},
      {"class_separation", "3", "distance of class means from the origin"},
      {"shift_rotation", "0.5", "max Givens angle per domain (radians)"},
      {"shift_translation", "1", "max per-axis offset per domain"},
      {"shift_log_scale", "0.2", "max per-axis log scale per domain"},
      {"noise_sigma", "1", "isotropic class noise"},
      {"label_skew", "0.3", "per-domain class imbalance in [0, 1)"},
      {"data_seed", "0", "seed of the synthetic scenario"},
      {"features", "", "feature CSV; replaces the synthetic scenario"},
      {"answer_key", "", "answer-key CSV for an external feature file"},
      {"budget", "10", "labels per round"},
      {"rounds", "5", "selection rounds"},
      {"alpha", "60", "percent of each cluster kept by uncertainty"},
      {"epsilon", "1e-05", "variance guard of the standardized distance"},
      {"distance", "standardized", "standardized | mean_only | wasserstein"},
      {"aggregate", "min", "min | avg over source domains"},
      {"global_embed", "gradient", "clustering space: gradient | feature"},
      {"local_embed", "feature", "domain distance space: gradient | feature"},
      {"kmeans_max_iters", "100", "Lloyd iteration cap"},
      {"kmeans_tol", "1e-06", "relative objective tolerance"},
      {"selection_seed", "0", "seed of clustering and baselines"},
      {"epochs", "20", "training epochs"},
      {"active_epochs", "", "epochs at which rounds run; empty spreads them over the second half"},
      {"learning_rate", "0.002", "SGD step size"},
      {"momentum", "0.95", "SGD momentum"},
      {"batch_size", "64", "source rows per step"},
      {"hidden_dim", "0", "hidden width; 0 for a linear model"},
      {"target_loss_weight", "1", "weight of the labeled-target loss"},
      {"train_seed", "0", "seed of initialization and shuffling"},
      {"strategies", "gala", "comma list of gala, random, entropy, margin, badge, none, full"},
      {"seeds", "0", "comma list or inclusive range a..b"},
      {"threads", "1", "concurrent experiment cells"},
      {"diagnostics", "true", "report proxy A-distance and joint accuracy"},
  };
  return keys;
}

ConfigEntries parse_config(std::string_view text) {
  ConfigEntries out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!find_key(key)) throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigEntries read_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

ConfigEntries merge_config(ConfigEntries base, const ConfigEntries& overrides) {
  for (const auto& [k, v] : overrides) {
    if (!find_key(k)) throw Error(ErrorCode::BadConfig, "unknown config key '" + k + "'");
    base[k] = v;
  }
  return base;
}

ExperimentSpec build_spec(const ConfigEntries& entries) {
  ExperimentSpec spec;
  auto& sc = spec.data.scenario;
  auto& sel = spec.selection;
  auto& tr = spec.training;
  bool explicit_schedule = false;
  for (const auto& [k, v] : entries) {
    if (!find_key(k)) throw Error(ErrorCode::BadConfig, "unknown config key '" + k + "'");
    if (k == "sources") {
      sc.n_source_domains = to_int(k, v);
      spec.data.n_source_domains = sc.n_source_domains;
    } else if (k == "samples_per_domain") sc.samples_per_domain = to_int(k, v);
    else if (k == "classes") {
      sc.n_classes = to_int(k, v);
      spec.data.n_classes = sc.n_classes;
    } else if (k == "dim") sc.feature_dim = to_int(k, v);
    else if (k == "class_separation") sc.class_separation = to_double(k, v);
    else if (k == "shift_rotation") sc.domain_shift.rotation = to_double(k, v);
    else if (k == "shift_translation") sc.domain_shift.translation = to_double(k, v);
    else if (k == "shift_log_scale") sc.domain_shift.log_scale = to_double(k, v);
    else if (k == "noise_sigma") sc.noise_sigma = to_double(k, v);
    else if (k == "label_skew") sc.label_skew = to_double(k, v);
    else if (k == "data_seed") sc.rng_seed = to_seed(k, v);
    else if (k == "features") spec.data.features_path = v;
    else if (k == "answer_key") spec.data.answer_key_path = v;
    else if (k == "budget") sel.budget_per_round = to_int(k, v);
    else if (k == "rounds") sel.rounds = to_int(k, v);
    else if (k == "alpha") sel.alpha_percent = to_double(k, v);
    else if (k == "epsilon") sel.epsilon = to_double(k, v);
    else if (k == "distance") sel.distance_mode = enum_value(k, v, parse_distance_mode);
    else if (k == "aggregate") sel.aggregation_mode = enum_value(k, v, parse_aggregation_mode);
    else if (k == "global_embed") sel.global_embedding = enum_value(k, v, parse_embedding_space);
    else if (k == "local_embed") sel.local_embedding = enum_value(k, v, parse_embedding_space);
    else if (k == "kmeans_max_iters") sel.kmeans_max_iters = to_int(k, v);
    else if (k == "kmeans_tol") sel.kmeans_tol = to_double(k, v);
    else if (k == "selection_seed") sel.rng_seed = to_seed(k, v);
    else if (k == "epochs") tr.epochs = to_int(k, v);
    else if (k == "active_epochs") {
      if (!trim(v).empty()) {
        tr.active_epochs = to_list<int>(k, v, to_int);
        explicit_schedule = true;
      }
    } else if (k == "learning_rate") tr.learning_rate = to_double(k, v);
    else if (k == "momentum") tr.momentum = to_double(k, v);
    else if (k == "batch_size") tr.batch_size = to_int(k, v);
    else if (k == "hidden_dim") tr.hidden_dim = to_int(k, v);
    else if (k == "target_loss_weight") tr.target_loss_weight = to_double(k, v);
    else if (k == "train_seed") tr.rng_seed = to_seed(k, v);
    else if (k == "strategies") spec.strategies = enum_value(k, v, parse_strategy_list);
    else if (k == "seeds") spec.seeds = to_seeds(k, v);
    else if (k == "threads") spec.threads = to_int(k, v);
    else if (k == "diagnostics") spec.diagnostics = to_bool(k, v);
  }
  if (!explicit_schedule) {
    if (sel.rounds < 1 || tr.epochs < 1) throw Error(ErrorCode::BadConfig, "rounds and epochs must be positive");
    tr.active_epochs = TrainConfig::even_schedule(tr.epochs, sel.rounds);
  }
  spec.validate();
  return spec;
}

std::string default_config_text() {
  std::string out;
  for (const auto& k : config_keys()) {
    out += "# " + std::string(k.help) + "\n";
    out += std::string(k.name) + " = " + std::string(k.default_value) + "\n";
  }
  return out;
}

}  // namespace gala
