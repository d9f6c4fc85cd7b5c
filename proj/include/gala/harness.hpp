#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gala/datagen.hpp"
#include "gala/selection.hpp"
#include "gala/trainer.hpp"
#include "gala/types.hpp"

namespace gala {

// `none` trains with zero target budget; `full` labels the whole target from
// the start and serves as the upper-bound control.
enum class Strategy { gala, random, entropy, margin, badge, none, full };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);
std::vector<Strategy> parse_strategy_list(std::string_view csv);

struct DataSource {
  ScenarioConfig scenario;
  std::filesystem::path features_path;  // when set, loaded instead of generated
  std::filesystem::path answer_key_path;
  int n_source_domains = 0;  // 0: infer from the file
  int n_classes = 0;

  bool external() const { return !features_path.empty(); }
};

struct ExperimentSpec {
  DataSource data;
  SelectionConfig selection;
  TrainConfig training;
  std::vector<Strategy> strategies{Strategy::gala};
  std::vector<std::uint64_t> seeds{0};
  int threads = 1;  // concurrent (strategy, seed) cells
  bool diagnostics = true;
  std::string variant;  // free-form tag copied into every report

  void validate() const;
};

struct RoundReport {
  std::string strategy;
  std::string variant;
  std::uint64_t seed = 0;
  int round = 0;
  bool final = false;
  std::vector<std::int64_t> selected_ids;  // ids of the feature file
  std::vector<std::optional<double>> domain_accuracy;  // domains 0..K
  std::optional<double> target_accuracy;
  double budget_fraction = 0.0;
  std::optional<double> proxy_a_distance;
  std::optional<double> joint_accuracy;

  bool operator==(const RoundReport&) const = default;
};

// Materialized data of one seed.
struct ExperimentData {
  Dataset dataset;
  AnswerKey answer_key;
};

ExperimentData load_experiment_data(const DataSource& source, std::uint64_t seed);

// Algorithm loop for every (strategy, seed) cell. Round r's report carries the
// labels picked in round r and the accuracies after the training segment that
// follows it; the last report of a cell is flagged final. `none` and `full`
// emit only a final report.
std::vector<RoundReport> run_experiment(const ExperimentSpec& spec);

// Single cell on prepared data.
std::vector<RoundReport> run_cell(const ExperimentSpec& spec, Strategy strategy, std::uint64_t seed,
                                  const ExperimentData& data);

// Proxy A-distance of source-union vs target in the model's feature space:
// 2 (1 - 2 err) of a logistic probe trained on a balanced 50/50 split,
// clamped to [0, 2].
double proxy_domain_discrepancy(const Dataset& ds, const ModelState& model, std::uint64_t seed);

// Same probe on raw vectors: label 0 rows vs label 1 rows.
double proxy_a_distance(const Matrix& a, const Matrix& b, std::uint64_t seed);

struct SweepRow {
  std::string label;
  double value = 0.0;  // alpha for alpha sweeps, index otherwise
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> per_seed;
};

std::vector<SweepRow> alpha_sweep(const ExperimentSpec& spec, std::span<const double> alphas);
std::vector<SweepRow> distance_sweep(const ExperimentSpec& spec);
std::vector<SweepRow> aggregation_sweep(const ExperimentSpec& spec);
std::vector<SweepRow> embedding_sweep(const ExperimentSpec& spec);

struct AblationFlags {
  bool alpha60_best = false;
  bool standardized_ge_mean_only = false;
  bool min_ge_average = false;
};

AblationFlags ablation_flags(const std::vector<SweepRow>& alpha_rows, const std::vector<SweepRow>& distance_rows,
                             const std::vector<SweepRow>& aggregation_rows);

std::string format_sweep_table(std::string_view title, const std::vector<SweepRow>& rows);

// Report files.
nlohmann::json report_to_json(const RoundReport& r);
RoundReport report_from_json(const nlohmann::json& j);
std::string reports_to_jsonl(const std::vector<RoundReport>& reports);
std::vector<RoundReport> reports_from_jsonl(std::string_view text);
std::string summary_csv(const std::vector<RoundReport>& reports);

struct StrategySummary {
  std::string strategy;
  std::size_t runs = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct PairedWins {
  std::string baseline;
  std::size_t wins = 0;    // seeds where gala is strictly better
  std::size_t ties = 0;
  std::size_t paired = 0;  // seeds present for both
};

struct ReportSummary {
  std::vector<StrategySummary> strategies;  // first-appearance order
  std::vector<PairedWins> gala_vs;
};

// Final target accuracy per strategy (mean, sample std) and gala-vs-baseline
// paired win counts, keyed by seed.
ReportSummary summarize(const std::vector<RoundReport>& reports);
std::string format_summary(const ReportSummary& s);

double mean_of(std::span<const double> v);
double stddev_of(std::span<const double> v);

}  // namespace gala
