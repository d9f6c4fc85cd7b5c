#include "gala/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace gala {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLabel: return "INVALID_LABEL";
    case ErrorCode::NonFinite: return "NON_FINITE";
    case ErrorCode::BadShape: return "BAD_SHAPE";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::EmptyFeature: return "EMPTY_FEATURE";
    case ErrorCode::BadId: return "BAD_ID";
    case ErrorCode::TooFewPoints: return "TOO_FEW_POINTS";
    case ErrorCode::DegenerateDim: return "DEGENERATE_DIM";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::TooFewTargets: return "TOO_FEW_TARGETS";
    case ErrorCode::EmptyList: return "EMPTY_LIST";
    case ErrorCode::NoSourceStats: return "NO_SOURCE_STATS";
    case ErrorCode::NoLabeledData: return "NO_LABELED_DATA";
    case ErrorCode::EmptyDomain: return "EMPTY_DOMAIN";
    case ErrorCode::BadConfig: return "BAD_CONFIG";
    case ErrorCode::InsufficientBudget: return "INSUFFICIENT_BUDGETABLE_SAMPLES";
    case ErrorCode::Io: return "IO";
    case ErrorCode::Schema: return "SCHEMA";
  }
  return "UNKNOWN";
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(ErrorCode::BadShape, "row width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<std::size_t> Dataset::rows_in_domain(int domain) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < domains.size(); ++i)
    if (domains[i] == domain) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::source_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < domains.size(); ++i)
    if (domains[i] < n_source_domains) out.push_back(i);
  return out;
}

void validate_dataset(const Dataset& ds) {
  if (ds.n_source_domains < 1) throw Error(ErrorCode::BadShape, "need at least one source domain");
  if (ds.n_classes < 2) throw Error(ErrorCode::BadShape, "need at least two classes");
  if (ds.features.cols() < 1) throw Error(ErrorCode::BadShape, "feature dimension must be >= 1");
  const std::size_t n = ds.features.rows();
  if (ds.labels.size() != n || ds.domains.size() != n || ds.ids.size() != n)
    throw Error(ErrorCode::BadShape, "labels/domains/ids must have one entry per row");
  for (double v : ds.features.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "feature matrix has a non-finite entry");
  for (std::size_t i = 0; i < n; ++i) {
    const int dom = ds.domains[i];
    const int lab = ds.labels[i];
    if (dom < 0 || dom > ds.n_source_domains)
      throw Error(ErrorCode::BadShape, "row " + std::to_string(i) + " has domain out of range");
    if (lab != kUnlabeled && (lab < 0 || lab >= ds.n_classes))
      throw Error(ErrorCode::InvalidLabel, "row " + std::to_string(i) + " has label out of range");
    if (dom < ds.n_source_domains && lab == kUnlabeled)
      throw Error(ErrorCode::InvalidLabel, "source row " + std::to_string(i) + " is unlabeled");
  }
}

void validate_model(const ModelState& m) {
  if (m.last_weights.empty() || m.last_bias.size() != m.last_weights.cols())
    throw Error(ErrorCode::ShapeMismatch, "last layer shape");
  if (m.has_hidden() && (m.hidden_bias.size() != m.hidden_weights.cols() ||
                         m.hidden_weights.cols() != m.last_weights.rows()))
    throw Error(ErrorCode::ShapeMismatch, "hidden layer shape");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(m.hidden_weights.data()) || !finite(m.hidden_bias) || !finite(m.last_weights.data()) ||
      !finite(m.last_bias))
    throw Error(ErrorCode::NonFinite, "model parameter is not finite");
}

std::string_view to_string(DistanceMode m) {
  switch (m) {
    case DistanceMode::standardized: return "standardized";
    case DistanceMode::mean_only: return "mean_only";
    case DistanceMode::wasserstein: return "wasserstein";
  }
  return "?";
}

std::string_view to_string(AggregationMode m) {
  return m == AggregationMode::minimum ? "min" : "avg";
}

std::string_view to_string(EmbeddingSpace m) {
  return m == EmbeddingSpace::gradient ? "gradient" : "feature";
}

DistanceMode parse_distance_mode(std::string_view s) {
  if (s == "standardized") return DistanceMode::standardized;
  if (s == "mean_only") return DistanceMode::mean_only;
  if (s == "wasserstein") return DistanceMode::wasserstein;
  throw Error(ErrorCode::BadConfig, "unknown distance mode '" + std::string(s) + "'");
}

AggregationMode parse_aggregation_mode(std::string_view s) {
  if (s == "min" || s == "minimum") return AggregationMode::minimum;
  if (s == "avg" || s == "average") return AggregationMode::average;
  throw Error(ErrorCode::BadConfig, "unknown aggregation mode '" + std::string(s) + "'");
}

EmbeddingSpace parse_embedding_space(std::string_view s) {
  if (s == "gradient") return EmbeddingSpace::gradient;
  if (s == "feature") return EmbeddingSpace::feature;
  throw Error(ErrorCode::BadConfig, "unknown embedding space '" + std::string(s) + "'");
}

void SelectionConfig::validate(std::size_t n_targets) const {
  if (budget_per_round < 1) throw Error(ErrorCode::BadConfig, "budget must be positive");
  if (rounds < 1) throw Error(ErrorCode::BadConfig, "rounds must be positive");
  if (!(alpha_percent > 0.0 && alpha_percent <= 100.0))
    throw Error(ErrorCode::BadConfig, "alpha must lie in (0, 100]");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::BadConfig, "epsilon must be positive");
  if (kmeans_max_iters < 1) throw Error(ErrorCode::BadConfig, "kmeans_max_iters must be positive");
  if (!(kmeans_tol >= 0.0)) throw Error(ErrorCode::BadConfig, "kmeans_tol must be nonnegative");
  if (n_targets > 0 &&
      static_cast<std::size_t>(budget_per_round) * static_cast<std::size_t>(rounds) > n_targets)
    throw Error(ErrorCode::InsufficientBudget,
                "rounds x budget exceeds the " + std::to_string(n_targets) + " target samples");
}

LabeledPool::LabeledPool(std::vector<std::size_t> target_rows) : remaining_(std::move(target_rows)) {
  std::sort(remaining_.begin(), remaining_.end());
  remaining_.erase(std::unique(remaining_.begin(), remaining_.end()), remaining_.end());
}

void LabeledPool::annotate(std::span<const std::size_t> ids) {
  std::unordered_set<std::size_t> taken;
  for (auto id : ids) {
    if (!taken.insert(id).second) throw Error(ErrorCode::BadId, "id selected twice");
    if (!std::binary_search(remaining_.begin(), remaining_.end(), id))
      throw Error(ErrorCode::BadId, "id " + std::to_string(id) + " is not in the unlabeled pool");
  }
  std::erase_if(remaining_, [&](std::size_t id) { return taken.count(id) > 0; });
  selected_.insert(selected_.end(), ids.begin(), ids.end());
}

bool LabeledPool::partitions(std::span<const std::size_t> all_targets) const {
  std::vector<std::size_t> sel(selected_);
  std::sort(sel.begin(), sel.end());
  if (std::adjacent_find(sel.begin(), sel.end()) != sel.end()) return false;
  std::vector<std::size_t> merged;
  std::merge(sel.begin(), sel.end(), remaining_.begin(), remaining_.end(), std::back_inserter(merged));
  if (std::adjacent_find(merged.begin(), merged.end()) != merged.end()) return false;
  std::vector<std::size_t> all(all_targets.begin(), all_targets.end());
  std::sort(all.begin(), all.end());
  return merged == all;
}

}  // namespace gala
