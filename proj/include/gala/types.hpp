#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gala {

enum class ErrorCode {
  InvalidLabel,
  NonFinite,
  BadShape,
  ShapeMismatch,
  EmptyFeature,
  BadId,
  TooFewPoints,
  DegenerateDim,
  DimMismatch,
  TooFewTargets,
  EmptyList,
  NoSourceStats,
  NoLabeledData,
  EmptyDomain,
  BadConfig,
  InsufficientBudget,
  Io,
  Schema,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr int kUnlabeled = -1;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  void append_row(std::span<const double> values);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// The sample universe of one experiment. Domain ids [0, K) are sources, K is
// the target. Rows are addressed by index; `ids` carries the external id
// column of the feature file.
struct Dataset {
  std::vector<std::int64_t> ids;
  Matrix features;
  std::vector<int> labels;
  std::vector<int> domains;
  int n_classes = 0;
  int n_source_domains = 0;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dim() const noexcept { return features.cols(); }
  int target_domain() const noexcept { return n_source_domains; }
  bool is_source(std::size_t row) const { return domains[row] < n_source_domains; }

  std::vector<std::size_t> rows_in_domain(int domain) const;
  std::vector<std::size_t> source_rows() const;
  std::vector<std::size_t> target_rows() const { return rows_in_domain(target_domain()); }

  bool operator==(const Dataset&) const = default;
};

// Throws gala::Error unless every Dataset invariant holds.
void validate_dataset(const Dataset& ds);

// Softmax classifier with an optional ReLU hidden layer. The pre-last-layer
// representation is the hidden activation, or the input itself when
// hidden_dim == 0.
struct ModelState {
  Matrix hidden_weights;  // d x h
  std::vector<double> hidden_bias;
  Matrix last_weights;  // f x C
  std::vector<double> last_bias;

  bool has_hidden() const noexcept { return !hidden_weights.empty(); }
  std::size_t input_dim() const noexcept {
    return has_hidden() ? hidden_weights.rows() : last_weights.rows();
  }
  std::size_t feature_dim() const noexcept { return last_weights.rows(); }
  std::size_t n_classes() const noexcept { return last_weights.cols(); }

  bool operator==(const ModelState&) const = default;
};

void validate_model(const ModelState& model);

enum class DistanceMode { standardized, mean_only, wasserstein };
enum class AggregationMode { minimum, average };
enum class EmbeddingSpace { gradient, feature };

std::string_view to_string(DistanceMode m);
std::string_view to_string(AggregationMode m);
std::string_view to_string(EmbeddingSpace m);
DistanceMode parse_distance_mode(std::string_view s);
AggregationMode parse_aggregation_mode(std::string_view s);
EmbeddingSpace parse_embedding_space(std::string_view s);

struct SelectionConfig {
  int budget_per_round = 10;
  int rounds = 5;
  double alpha_percent = 60.0;
  double epsilon = 1e-5;
  DistanceMode distance_mode = DistanceMode::standardized;
  AggregationMode aggregation_mode = AggregationMode::minimum;
  EmbeddingSpace global_embedding = EmbeddingSpace::gradient;
  EmbeddingSpace local_embedding = EmbeddingSpace::feature;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  std::uint64_t rng_seed = 0;

  // Checks ranges; when n_targets > 0 also checks rounds * budget <= n_targets.
  void validate(std::size_t n_targets = 0) const;
};

// Target rows annotated so far and those still unlabeled. Ids are dataset
// row indices.
class LabeledPool {
 public:
  LabeledPool() = default;
  explicit LabeledPool(std::vector<std::size_t> target_rows);
  static LabeledPool for_targets(const Dataset& ds) { return LabeledPool(ds.target_rows()); }

  const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  const std::vector<std::size_t>& remaining() const noexcept { return remaining_; }

  // Moves `ids` from remaining to selected, preserving their order.
  // Throws BadId if any id is not currently remaining or repeats.
  void annotate(std::span<const std::size_t> ids);

  // True when selected/remaining are disjoint and cover `all_targets`.
  bool partitions(std::span<const std::size_t> all_targets) const;

 private:
  std::vector<std::size_t> selected_;
  std::vector<std::size_t> remaining_;  // ascending
};

}  // namespace gala
