#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "gala/config.hpp"
#include "gala/datagen.hpp"
#include "gala/embedding.hpp"
#include "gala/harness.hpp"
#include "gala/io.hpp"
#include "gala/selection.hpp"
#include "gala/trainer.hpp"

namespace fs = std::filesystem;
using namespace gala;

namespace {

struct Flags {
  std::string config;
  std::string seed, budget, rounds, alpha, distance, aggregate, global_embed, local_embed, strategy;
  std::string out = ".";
};

void add_common(CLI::App* app, Flags& f, bool with_strategy) {
  app->add_option("--config", f.config, "key = value config file");
  app->add_option("--seed", f.seed, "seed override");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--budget", f.budget, "labels per round");
  app->add_option("--rounds", f.rounds, "selection rounds");
  app->add_option("--alpha", f.alpha, "percent kept per cluster");
  app->add_option("--distance", f.distance, "standardized | mean_only | wasserstein");
  app->add_option("--aggregate", f.aggregate, "min | avg");
  app->add_option("--global-embed", f.global_embed, "gradient | feature");
  app->add_option("--local-embed", f.local_embed, "gradient | feature");
  if (with_strategy) app->add_option("--strategy", f.strategy, "comma list of strategies");
}

// File entries first, flags on top.
ConfigEntries gather(const Flags& f, const std::string& seed_key) {
  ConfigEntries entries = f.config.empty() ? ConfigEntries{} : read_config(f.config);
  ConfigEntries flags;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) flags[key] = v;
  };
  put(seed_key.c_str(), f.seed);
  put("budget", f.budget);
  put("rounds", f.rounds);
  put("alpha", f.alpha);
  put("distance", f.distance);
  put("aggregate", f.aggregate);
  put("global_embed", f.global_embed);
  put("local_embed", f.local_embed);
  put("strategies", f.strategy);
  return merge_config(std::move(entries), flags);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

// The env var caps concurrent cells; without a config value all cores are used.
void apply_thread_cap(ExperimentSpec& spec, const ConfigEntries& entries) {
  if (!entries.count("threads")) spec.threads = std::max(1, omp_get_max_threads());
  if (const char* env = std::getenv("GALA_THREADS")) {
    const long long cap = parse_int(env);
    if (cap < 1) throw Error(ErrorCode::BadConfig, "GALA_THREADS must be positive");
    spec.threads = std::min<long long>(spec.threads, cap);
  }
}

int cmd_gen(const Flags& f) {
  const auto spec = build_spec(gather(f, "data_seed"));
  if (spec.data.external()) throw Error(ErrorCode::BadConfig, "gen needs a synthetic scenario, not 'features'");
  const auto sc = generate(spec.data.scenario);
  ensure_dir(f.out);
  write_dataset_csv(sc.dataset, fs::path(f.out) / "features.csv");
  write_answer_key_csv(sc.dataset, sc.answer_key, fs::path(f.out) / "answer_key.csv");
  std::cout << "wrote " << sc.dataset.size() << " rows and " << sc.answer_key.rows.size() << " answer-key rows to "
            << f.out << "\n";
  return 0;
}

int cmd_select(const Flags& f, const std::string& features, const std::string& model_path,
               const std::string& probs_path, int round, const std::string& out_file) {
  if (features.empty()) throw Error(ErrorCode::BadConfig, "--features is required");
  if (model_path.empty() == probs_path.empty()) throw Error(ErrorCode::BadConfig, "give exactly one of --model, --probs");
  auto entries = gather(f, "selection_seed");
  entries["features"] = features;
  entries.erase("active_epochs");
  auto spec = build_spec(entries);
  SelectionConfig cfg = spec.selection;
  cfg.rounds = 1;

  const Dataset ds = read_dataset_csv(features, spec.data.n_source_domains, spec.data.n_classes);
  validate_dataset(ds);
  std::vector<std::size_t> unlabeled;
  for (auto r : ds.target_rows())
    if (ds.labels[r] == kUnlabeled) unlabeled.push_back(r);
  LabeledPool pool(unlabeled);

  SelectionResult res;
  if (!model_path.empty()) {
    res = select_round(pool, load_model(model_path), ds, cfg, round, Exec::parallel);
  } else {
    Matrix probs = read_probabilities_csv(probs_path, ds);
    const auto source_rows = ds.source_rows();
    // Source probabilities only feed the gradient space.
    for (auto r : source_rows) {
      if (!std::isnan(probs(r, 0))) continue;
      if (cfg.local_embedding == EmbeddingSpace::gradient)
        throw Error(ErrorCode::Schema, "gradient local space needs probabilities for source id " +
                                           std::to_string(ds.ids[r]));
      for (std::size_t k = 0; k < probs.cols(); ++k) probs(r, k) = 1.0 / static_cast<double>(probs.cols());
    }
    for (auto r : unlabeled)
      if (std::isnan(probs(r, 0)))
        throw Error(ErrorCode::Schema, "missing probabilities for target id " + std::to_string(ds.ids[r]));
    if (unlabeled.size() < static_cast<std::size_t>(cfg.budget_per_round))
      throw Error(ErrorCode::TooFewTargets, "unlabeled pool smaller than the round budget");
    const auto targets = embed_from_probs(ds, probs, unlabeled);
    const auto sources = embed_from_probs(ds, probs, source_rows);
    std::vector<int> source_domains;
    for (auto r : source_rows) source_domains.push_back(ds.domains[r]);
    res = select_from_bundles(targets, sources, source_domains, ds.n_source_domains, cfg, round, Exec::parallel);
  }

  nlohmann::json j;
  j["round"] = res.round;
  auto ids = nlohmann::json::array();
  for (auto s : res.selected_ids) ids.push_back(ds.ids[s]);
  j["selected_ids"] = ids;
  auto scores = nlohmann::json::array();
  for (const auto& s : res.scores)
    scores.push_back({{"id", ds.ids[s.sample_id]},
                      {"cluster", s.cluster},
                      {"uncertainty", s.uncertainty},
                      {"distance", s.domain_distance},
                      {"score", s.v}});
  j["scores"] = scores;
  const std::string text = j.dump(2) + "\n";
  if (out_file == "-") {
    std::cout << text;
  } else {
    ensure_dir(f.out);
    write_file_atomic(fs::path(f.out) / out_file, text);
    std::cout << "selected " << res.selected_ids.size() << " ids -> " << (fs::path(f.out) / out_file).string()
              << "\n";
  }
  return 0;
}

int cmd_run(const Flags& f) {
  const auto entries = gather(f, "seeds");
  auto spec = build_spec(entries);
  apply_thread_cap(spec, entries);
  const auto reports = run_experiment(spec);
  ensure_dir(f.out);
  write_file_atomic(fs::path(f.out) / "reports.jsonl", reports_to_jsonl(reports));
  write_file_atomic(fs::path(f.out) / "summary.csv", summary_csv(reports));
  std::cout << format_summary(summarize(reports));
  return 0;
}

int cmd_report(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(ErrorCode::EmptyList, "no report files given");
  std::vector<RoundReport> all;
  for (const auto& p : paths) {
    auto part = reports_from_jsonl(read_file(p));
    all.insert(all.end(), part.begin(), part.end());
  }
  if (all.empty()) throw Error(ErrorCode::EmptyList, "report files hold no reports");
  std::cout << format_summary(summarize(all));
  return 0;
}

int cmd_sweep(const Flags& f, const std::string& kind, const std::string& alphas_text) {
  const auto entries = gather(f, "seeds");
  auto spec = build_spec(entries);
  apply_thread_cap(spec, entries);
  std::vector<double> alphas;
  std::stringstream ss(alphas_text);
  for (std::string s; std::getline(ss, s, ',');) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) continue;
    try {
      alphas.push_back(parse_double(s));
    } catch (const Error&) {
      throw Error(ErrorCode::BadConfig, "bad alpha list: " + alphas_text);
    }
  }
  const bool all = kind == "all";
  if (!all && kind != "alpha" && kind != "distance" && kind != "aggregation" && kind != "embedding")
    throw Error(ErrorCode::BadConfig, "unknown sweep kind '" + kind + "'");

  std::string text, csv = "sweep,label,value,mean_accuracy,std_accuracy,runs\n";
  std::vector<SweepRow> a_rows, d_rows, g_rows;
  auto emit = [&](const std::string& name, const std::vector<SweepRow>& rows) {
    text += format_sweep_table(name, rows) + "\n";
    for (const auto& r : rows)
      csv += name + ',' + '"' + r.label + '"' + ',' + format_double(r.value) + ',' + format_double(r.mean_accuracy) +
             ',' + format_double(r.std_accuracy) + ',' + std::to_string(r.per_seed.size()) + '\n';
  };
  if (all || kind == "alpha") emit("alpha", a_rows = alpha_sweep(spec, alphas));
  if (all || kind == "distance") emit("distance", d_rows = distance_sweep(spec));
  if (all || kind == "aggregation") emit("aggregation", g_rows = aggregation_sweep(spec));
  if (all || kind == "embedding") emit("embedding", embedding_sweep(spec));
  if (all) {
    const auto flags = ablation_flags(a_rows, d_rows, g_rows);
    auto yn = [](bool b) { return b ? "holds" : "does not hold"; };
    text += "orderings\n";
    text += std::string("  alpha=60 best:             ") + yn(flags.alpha60_best) + "\n";
    text += std::string("  standardized >= mean_only: ") + yn(flags.standardized_ge_mean_only) + "\n";
    text += std::string("  min >= avg:                ") + yn(flags.min_ge_average) + "\n";
  }
  ensure_dir(f.out);
  write_file_atomic(fs::path(f.out) / "sweep.txt", text);
  write_file_atomic(fs::path(f.out) / "sweep.csv", csv);
  std::cout << text;
  return 0;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadConfig:
    case ErrorCode::EmptyList: return 2;
    case ErrorCode::Io:
    case ErrorCode::Schema: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-and-locality-aware target sample selection"};
  app.require_subcommand(1);

  Flags gen_f, sel_f, run_f, sweep_f;
  auto* gen = app.add_subcommand("gen", "write a synthetic scenario as features.csv + answer_key.csv");
  add_common(gen, gen_f, false);

  auto* sel = app.add_subcommand("select", "one selection round over a feature file");
  add_common(sel, sel_f, false);
  std::string features, model_path, probs_path, sel_out = "selection.json";
  int round = 1;
  sel->add_option("--features", features, "feature CSV (id,domain,label,f0,...)");
  sel->add_option("--model", model_path, "model checkpoint JSON");
  sel->add_option("--probs", probs_path, "probabilities CSV (id,p0,...)");
  sel->add_option("--round", round, "round number recorded in the output");
  sel->add_option("--file", sel_out, "output file name inside --out, or - for stdout");

  auto* run = app.add_subcommand("run", "full experiment; writes reports.jsonl and summary.csv");
  add_common(run, run_f, true);

  auto* rep = app.add_subcommand("report", "summarize report files");
  std::vector<std::string> report_paths;
  rep->add_option("reports", report_paths, "JSONL report files");

  auto* sweep = app.add_subcommand("sweep", "ablation sweeps of the gala strategy");
  add_common(sweep, sweep_f, false);
  std::string kind = "all", alphas = "20,40,60,80,100";
  sweep->add_option("--kind", kind, "all | alpha | distance | aggregation | embedding");
  sweep->add_option("--alphas", alphas, "alpha values of the alpha sweep");

  auto* defaults = app.add_subcommand("defaults", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_gen(gen_f);
    if (*sel) return cmd_select(sel_f, features, model_path, probs_path, round, sel_out);
    if (*run) return cmd_run(run_f);
    if (*rep) return cmd_report(report_paths);
    if (*sweep) return cmd_sweep(sweep_f, kind, alphas);
    if (*defaults) {
      std::cout << default_config_text();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
