#include "gala/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "gala/io.hpp"
#include "gala/rng.hpp"

namespace gala {

namespace {

constexpr std::uint64_t kScenarioStream = 0x7363656eULL;
constexpr std::uint64_t kTrainStream = 0x747261696eULL;
constexpr std::uint64_t kModelStream = 0x6d6f64ULL;
constexpr std::uint64_t kSelectStream = 0x73656cULL;
constexpr std::uint64_t kProbeStream = 0x70726f6265ULL;

std::optional<BaselineStrategy> as_baseline(Strategy s) {
  switch (s) {
    case Strategy::random: return BaselineStrategy::random;
    case Strategy::entropy: return BaselineStrategy::entropy;
    case Strategy::margin: return BaselineStrategy::margin;
    case Strategy::badge: return BaselineStrategy::badge;
    default: return std::nullopt;
  }
}

std::optional<double> try_evaluate(const ModelState& model, const Dataset& ds, int domain, const AnswerKey& key) {
  try {
    return evaluate(model, ds, domain, &key, Exec::serial);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyDomain) return std::nullopt;
    throw;
  }
}

void fill_accuracy(RoundReport& r, const ModelState& model, const Dataset& ds, const AnswerKey& key) {
  r.domain_accuracy.clear();
  for (int d = 0; d <= ds.n_source_domains; ++d) r.domain_accuracy.push_back(try_evaluate(model, ds, d, key));
  r.target_accuracy = r.domain_accuracy.back();
}

double joint_accuracy(const ModelState& model, const Dataset& ds, const AnswerKey& key) {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int lab = ds.is_source(i) ? ds.labels[i] : key.label_of(i);
    if (lab == kUnlabeled) continue;
    rows.push_back(i);
    labels.push_back(lab);
  }
  return accuracy_on(model, ds.features, rows, labels, Exec::serial);
}

std::optional<double> json_opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string summary_key(const RoundReport& r) {
  return r.variant.empty() ? r.strategy : r.strategy + "[" + r.variant + "]";
}

std::vector<SweepRow> variant_sweep(const ExperimentSpec& spec,
                                    const std::vector<std::pair<std::string, SelectionConfig>>& variants) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    ExperimentSpec s = spec;
    s.strategies = {Strategy::gala};
    s.selection = variants[i].second;
    s.variant = variants[i].first;
    s.diagnostics = false;
    SweepRow row;
    row.label = variants[i].first;
    row.value = static_cast<double>(i);
    for (const auto& r : run_experiment(s))
      if (r.final && r.target_accuracy) row.per_seed.push_back(*r.target_accuracy);
    row.mean_accuracy = mean_of(row.per_seed);
    row.std_accuracy = stddev_of(row.per_seed);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::gala: return "gala";
    case Strategy::random: return "random";
    case Strategy::entropy: return "entropy";
    case Strategy::margin: return "margin";
    case Strategy::badge: return "badge";
    case Strategy::none: return "none";
    case Strategy::full: return "full";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  for (auto v : {Strategy::gala, Strategy::random, Strategy::entropy, Strategy::margin, Strategy::badge,
                 Strategy::none, Strategy::full})
    if (to_string(v) == s) return v;
  throw Error(ErrorCode::BadConfig, "unknown strategy '" + std::string(s) + "'");
}

std::vector<Strategy> parse_strategy_list(std::string_view csv) {
  std::vector<Strategy> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    auto item = csv.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_strategy(item));
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::BadConfig, "strategy list is empty");
  return out;
}

void ExperimentSpec::validate() const {
  if (strategies.empty()) throw Error(ErrorCode::BadConfig, "at least one strategy is required");
  if (seeds.empty()) throw Error(ErrorCode::BadConfig, "at least one seed is required");
  if (threads < 1) throw Error(ErrorCode::BadConfig, "threads must be positive");
  selection.validate();
  training.validate(selection.rounds);
  if (!data.external()) data.scenario.validate();
}

ExperimentData load_experiment_data(const DataSource& source, std::uint64_t seed) {
  ExperimentData out;
  if (source.external()) {
    out.dataset = read_dataset_csv(source.features_path, source.n_source_domains, source.n_classes);
    validate_dataset(out.dataset);
    if (!source.answer_key_path.empty()) out.answer_key = read_answer_key_csv(source.answer_key_path, out.dataset);
    // Target rows that arrive labeled count as annotations already known.
    for (auto r : out.dataset.target_rows()) {
      if (out.dataset.labels[r] == kUnlabeled) continue;
      if (out.answer_key.label_of(r) == kUnlabeled) {
        const auto it = std::lower_bound(out.answer_key.rows.begin(), out.answer_key.rows.end(), r);
        const auto pos = it - out.answer_key.rows.begin();
        out.answer_key.rows.insert(it, r);
        out.answer_key.labels.insert(out.answer_key.labels.begin() + pos, out.dataset.labels[r]);
      }
      out.dataset.labels[r] = kUnlabeled;
    }
    return out;
  }
  ScenarioConfig sc = source.scenario;
  sc.rng_seed = mix_seed(source.scenario.rng_seed, {kScenarioStream, seed});
  auto generated = generate(sc);
  out.dataset = std::move(generated.dataset);
  out.answer_key = std::move(generated.answer_key);
  return out;
}

std::vector<RoundReport> run_cell(const ExperimentSpec& spec, Strategy strategy, std::uint64_t seed,
                                  const ExperimentData& data) {
  Dataset ds = data.dataset;
  const AnswerKey& key = data.answer_key;
  const SelectionConfig& base_sel = spec.selection;
  TrainConfig tcfg = spec.training;
  tcfg.rng_seed = mix_seed(spec.training.rng_seed, {kTrainStream, seed});
  SelectionConfig scfg = base_sel;
  scfg.rng_seed = mix_seed(base_sel.rng_seed, {kSelectStream, seed});

  ModelState model = init_model(ds.dim(), static_cast<std::size_t>(tcfg.hidden_dim),
                                static_cast<std::size_t>(ds.n_classes), mix_seed(tcfg.rng_seed, {kModelStream}));
  LabeledPool pool = LabeledPool::for_targets(ds);
  const std::vector<std::size_t> all_targets = pool.remaining();
  const double n_t = static_cast<double>(all_targets.size());
  OptimizerState opt;

  auto finish = [&](RoundReport& r) {
    r.final = true;
    if (spec.diagnostics) {
      r.proxy_a_distance = proxy_domain_discrepancy(ds, model, mix_seed(seed, {kProbeStream}));
      r.joint_accuracy = joint_accuracy(model, ds, key);
    }
  };
  auto base_report = [&](int round) {
    RoundReport r;
    r.strategy = std::string(to_string(strategy));
    r.variant = spec.variant;
    r.seed = seed;
    r.round = round;
    return r;
  };

  std::vector<RoundReport> reports;
  if (strategy == Strategy::none || strategy == Strategy::full) {
    if (strategy == Strategy::full) {
      ds = annotate(std::move(ds), key, all_targets);
      pool.annotate(all_targets);
    }
    model = train_epochs(std::move(model), ds, pool, tcfg, 0, tcfg.epochs, &opt).model;
    RoundReport r = base_report(0);
    r.budget_fraction = n_t > 0 ? static_cast<double>(pool.selected().size()) / n_t : 0.0;
    fill_accuracy(r, model, ds, key);
    finish(r);
    reports.push_back(std::move(r));
    return reports;
  }

  if (static_cast<std::size_t>(scfg.budget_per_round) * static_cast<std::size_t>(scfg.rounds) > all_targets.size())
    throw Error(ErrorCode::InsufficientBudget, "rounds x budget exceeds the target pool");
  const auto& schedule = tcfg.active_epochs;
  const auto baseline = as_baseline(strategy);
  model = train_epochs(std::move(model), ds, pool, tcfg, 0, schedule.front(), &opt).model;
  for (int r = 1; r <= scfg.rounds; ++r) {
    std::vector<std::size_t> picked;
    if (strategy == Strategy::gala) {
      picked = select_round(pool, model, ds, scfg, r, Exec::serial).selected_ids;
    } else {
      picked = baseline_select(*baseline, pool, model, ds, scfg.budget_per_round,
                               mix_seed(scfg.rng_seed, {static_cast<std::uint64_t>(r)}), Exec::serial);
    }
    ds = annotate(std::move(ds), key, picked);
    pool.annotate(picked);
    if (!pool.partitions(all_targets)) throw Error(ErrorCode::BadId, "labeled pool lost its partition");

    const int seg_end = r < scfg.rounds ? schedule[r] : tcfg.epochs;
    model = train_epochs(std::move(model), ds, pool, tcfg, schedule[r - 1], seg_end, &opt).model;

    RoundReport rep = base_report(r);
    for (auto id : picked) rep.selected_ids.push_back(ds.ids[id]);
    rep.budget_fraction = static_cast<double>(pool.selected().size()) / n_t;
    fill_accuracy(rep, model, ds, key);
    if (r == scfg.rounds) finish(rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<RoundReport> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  // Data is shared by every strategy of a seed; external files are read once.
  std::vector<ExperimentData> data;
  if (spec.data.external()) {
    data.push_back(load_experiment_data(spec.data, 0));
  } else {
    for (auto seed : spec.seeds) data.push_back(load_experiment_data(spec.data, seed));
  }
  const std::size_t n_t = data.front().dataset.target_rows().size();
  if (static_cast<std::size_t>(spec.selection.budget_per_round) * spec.selection.rounds > n_t) {
    for (auto s : spec.strategies)
      if (s != Strategy::none && s != Strategy::full)
        throw Error(ErrorCode::InsufficientBudget, "rounds x budget exceeds the " + std::to_string(n_t) +
                                                       " target samples");
  }

  const std::size_t n_cells = spec.strategies.size() * spec.seeds.size();
  std::vector<std::vector<RoundReport>> results(n_cells);
  std::vector<std::exception_ptr> errors(n_cells);
  const auto n = static_cast<std::ptrdiff_t>(n_cells);
#pragma omp parallel for schedule(dynamic) num_threads(spec.threads)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const std::size_t si = static_cast<std::size_t>(c) / spec.seeds.size();
    const std::size_t ki = static_cast<std::size_t>(c) % spec.seeds.size();
    try {
      const auto& d = spec.data.external() ? data.front() : data[ki];
      results[c] = run_cell(spec, spec.strategies[si], spec.seeds[ki], d);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<RoundReport> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

double proxy_a_distance(const Matrix& a, const Matrix& b, std::uint64_t seed) {
  if (a.rows() == 0 || b.rows() == 0) throw Error(ErrorCode::EmptyDomain, "probe needs rows from both sides");
  const std::size_t d = a.cols();
  const std::size_t m = std::min(a.rows(), b.rows());
  Rng rng(seed);
  std::vector<std::size_t> ia(a.rows()), ib(b.rows());
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  rng.shuffle(ia.begin(), ia.end());
  rng.shuffle(ib.begin(), ib.end());
  ia.resize(m);
  ib.resize(m);
  const std::size_t half = m / 2;
  if (half == 0 || m - half == 0) throw Error(ErrorCode::EmptyDomain, "probe needs at least two rows per side");

  // Train on the first half of each side, test on the rest.
  struct Sample {
    std::span<const double> x;
    double y;
  };
  std::vector<Sample> train, test;
  for (std::size_t i = 0; i < m; ++i) {
    (i < half ? train : test).push_back({a.row(ia[i]), 0.0});
    (i < half ? train : test).push_back({b.row(ib[i]), 1.0});
  }
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (const auto& s : train)
    for (std::size_t j = 0; j < d; ++j) mu[j] += s.x[j];
  for (double& v : mu) v /= static_cast<double>(train.size());
  for (const auto& s : train)
    for (std::size_t j = 0; j < d; ++j) sd[j] += (s.x[j] - mu[j]) * (s.x[j] - mu[j]);
  for (double& v : sd) v = std::sqrt(v / static_cast<double>(train.size())) + 1e-12;

  std::vector<double> w(d, 0.0), z(d), grad(d);
  double bias = 0.0;
  const double lr = 0.5, l2 = 1e-4;
  for (int it = 0; it < 300; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (const auto& s : train) {
      double t = bias;
      for (std::size_t j = 0; j < d; ++j) t += w[j] * (s.x[j] - mu[j]) / sd[j];
      const double err = 1.0 / (1.0 + std::exp(-t)) - s.y;
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * (s.x[j] - mu[j]) / sd[j];
      gb += err;
    }
    const double inv = 1.0 / static_cast<double>(train.size());
    for (std::size_t j = 0; j < d; ++j) w[j] -= lr * (grad[j] * inv + l2 * w[j]);
    bias -= lr * gb * inv;
  }
  std::size_t wrong = 0;
  for (const auto& s : test) {
    double t = bias;
    for (std::size_t j = 0; j < d; ++j) t += w[j] * (s.x[j] - mu[j]) / sd[j];
    if ((t > 0.0 ? 1.0 : 0.0) != s.y) ++wrong;
  }
  const double err = static_cast<double>(wrong) / static_cast<double>(test.size());
  return std::clamp(2.0 * (1.0 - 2.0 * err), 0.0, 2.0);
}

double proxy_domain_discrepancy(const Dataset& ds, const ModelState& model, std::uint64_t seed) {
  const auto src = ds.source_rows();
  const auto tgt = ds.target_rows();
  if (src.empty() || tgt.empty()) throw Error(ErrorCode::EmptyDomain, "need both source and target rows");
  Matrix fs(src.size(), model.feature_dim()), ps(src.size(), model.n_classes());
  Matrix ft(tgt.size(), model.feature_dim()), pt(tgt.size(), model.n_classes());
  kernels::forward_rows(model, ds.features, src, fs, ps, Exec::serial);
  kernels::forward_rows(model, ds.features, tgt, ft, pt, Exec::serial);
  return proxy_a_distance(fs, ft, seed);
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<SweepRow> alpha_sweep(const ExperimentSpec& spec, std::span<const double> alphas) {
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::string, SelectionConfig>> variants;
  for (double a : sorted) {
    if (!(a > 0.0 && a <= 100.0)) throw Error(ErrorCode::BadConfig, "alpha must lie in (0, 100]");
    SelectionConfig c = spec.selection;
    c.alpha_percent = a;
    variants.emplace_back("alpha=" + format_double(a), c);
  }
  auto rows = variant_sweep(spec, variants);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].value = sorted[i];
  return rows;
}

std::vector<SweepRow> distance_sweep(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, SelectionConfig>> variants;
  for (auto m : {DistanceMode::standardized, DistanceMode::mean_only, DistanceMode::wasserstein}) {
    SelectionConfig c = spec.selection;
    c.distance_mode = m;
    variants.emplace_back("distance=" + std::string(to_string(m)), c);
  }
  return variant_sweep(spec, variants);
}

std::vector<SweepRow> aggregation_sweep(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, SelectionConfig>> variants;
  for (auto m : {AggregationMode::minimum, AggregationMode::average}) {
    SelectionConfig c = spec.selection;
    c.aggregation_mode = m;
    variants.emplace_back("aggregate=" + std::string(to_string(m)), c);
  }
  return variant_sweep(spec, variants);
}

std::vector<SweepRow> embedding_sweep(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, SelectionConfig>> variants;
  for (auto g : {EmbeddingSpace::feature, EmbeddingSpace::gradient})
    for (auto l : {EmbeddingSpace::feature, EmbeddingSpace::gradient}) {
      SelectionConfig c = spec.selection;
      c.global_embedding = g;
      c.local_embedding = l;
      variants.emplace_back("global=" + std::string(to_string(g)) + ",local=" + std::string(to_string(l)), c);
    }
  return variant_sweep(spec, variants);
}

AblationFlags ablation_flags(const std::vector<SweepRow>& alpha_rows, const std::vector<SweepRow>& distance_rows,
                             const std::vector<SweepRow>& aggregation_rows) {
  AblationFlags f;
  const SweepRow* at60 = nullptr;
  double best = -1.0;
  for (const auto& r : alpha_rows) {
    if (r.value == 60.0) at60 = &r;
    best = std::max(best, r.mean_accuracy);
  }
  f.alpha60_best = at60 != nullptr && at60->mean_accuracy >= best;
  auto find = [](const std::vector<SweepRow>& rows, std::string_view label) -> const SweepRow* {
    for (const auto& r : rows)
      if (r.label == label) return &r;
    return nullptr;
  };
  const auto* st = find(distance_rows, "distance=standardized");
  const auto* mo = find(distance_rows, "distance=mean_only");
  f.standardized_ge_mean_only = st && mo && st->mean_accuracy >= mo->mean_accuracy;
  const auto* mn = find(aggregation_rows, "aggregate=min");
  const auto* av = find(aggregation_rows, "aggregate=avg");
  f.min_ge_average = mn && av && mn->mean_accuracy >= av->mean_accuracy;
  return f;
}

std::string format_sweep_table(std::string_view title, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << title << "\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "  %-36s %7.2f%% +- %5.2f  (n=%zu)\n", r.label.c_str(), 100.0 * r.mean_accuracy,
                  100.0 * r.std_accuracy, r.per_seed.size());
    os << buf;
  }
  return os.str();
}

nlohmann::json report_to_json(const RoundReport& r) {
  nlohmann::json j;
  j["schema"] = "gala.round_report/1";
  j["strategy"] = r.strategy;
  j["variant"] = r.variant;
  j["seed"] = r.seed;
  j["round"] = r.round;
  j["final"] = r.final;
  j["selected_ids"] = r.selected_ids;
  auto acc = nlohmann::json::array();
  for (const auto& a : r.domain_accuracy) acc.push_back(opt_json(a));
  j["domain_accuracy"] = acc;
  j["target_accuracy"] = opt_json(r.target_accuracy);
  j["budget_fraction"] = r.budget_fraction;
  j["proxy_a_distance"] = opt_json(r.proxy_a_distance);
  j["joint_accuracy"] = opt_json(r.joint_accuracy);
  return j;
}

RoundReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema") != "gala.round_report/1") throw Error(ErrorCode::Schema, "unsupported report schema");
    RoundReport r;
    r.strategy = j.at("strategy").get<std::string>();
    r.variant = j.value("variant", std::string{});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.round = j.at("round").get<int>();
    r.final = j.at("final").get<bool>();
    r.selected_ids = j.at("selected_ids").get<std::vector<std::int64_t>>();
    for (const auto& a : j.at("domain_accuracy"))
      r.domain_accuracy.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
    r.target_accuracy = json_opt(j, "target_accuracy");
    r.budget_fraction = j.at("budget_fraction").get<double>();
    r.proxy_a_distance = json_opt(j, "proxy_a_distance");
    r.joint_accuracy = json_opt(j, "joint_accuracy");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("report: ") + e.what());
  }
}

std::string reports_to_jsonl(const std::vector<RoundReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += report_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<RoundReport> reports_from_jsonl(std::string_view text) {
  std::vector<RoundReport> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(start, nl - start);
    ++line_no;
    start = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + " is not JSON: " + e.what());
    }
    out.push_back(report_from_json(j));
  }
  return out;
}

std::string summary_csv(const std::vector<RoundReport>& reports) {
  std::string out = "strategy,seed,round,budget_fraction,target_accuracy\n";
  for (const auto& r : reports) {
    out += summary_key(r);
    out += ',' + std::to_string(r.seed) + ',' + std::to_string(r.round) + ',' + format_double(r.budget_fraction) + ',';
    if (r.target_accuracy) out += format_double(*r.target_accuracy);
    out += '\n';
  }
  return out;
}

ReportSummary summarize(const std::vector<RoundReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, double>> finals;
  for (const auto& r : reports) {
    if (!r.final || !r.target_accuracy) continue;
    const auto key = summary_key(r);
    if (!finals.count(key)) order.push_back(key);
    finals[key][r.seed] = *r.target_accuracy;
  }
  ReportSummary s;
  for (const auto& k : order) {
    std::vector<double> v;
    for (const auto& [seed, acc] : finals[k]) v.push_back(acc);
    s.strategies.push_back({k, v.size(), mean_of(v), stddev_of(v)});
  }
  for (const auto& gala_key : order) {
    if (gala_key.rfind("gala", 0) != 0) continue;
    for (const auto& k : order) {
      if (k.rfind("gala", 0) == 0) continue;
      PairedWins pw;
      pw.baseline = order.size() > 2 && gala_key != "gala" ? gala_key + " vs " + k : k;
      for (const auto& [seed, acc] : finals[gala_key]) {
        const auto it = finals[k].find(seed);
        if (it == finals[k].end()) continue;
        ++pw.paired;
        if (acc > it->second) ++pw.wins;
        else if (acc == it->second) ++pw.ties;
      }
      s.gala_vs.push_back(pw);
    }
  }
  return s;
}

std::string format_summary(const ReportSummary& s) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-28s %6s %10s %8s\n", "strategy", "runs", "mean(%)", "std");
  os << buf;
  for (const auto& r : s.strategies) {
    std::snprintf(buf, sizeof buf, "%-28s %6zu %10.2f %8.2f\n", r.strategy.c_str(), r.runs, 100.0 * r.mean,
                  100.0 * r.std);
    os << buf;
  }
  if (!s.gala_vs.empty()) {
    os << "\npaired wins (gala better / ties / paired seeds)\n";
    for (const auto& w : s.gala_vs) {
      std::snprintf(buf, sizeof buf, "  vs %-24s %3zu / %3zu / %3zu\n", w.baseline.c_str(), w.wins, w.ties, w.paired);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace gala
