#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gala/clustering.hpp"
#include "gala/embedding.hpp"
#include "gala/types.hpp"

namespace gala {

// Candidate lists hold positions into the bundle sequence handed to the step,
// ascending by sample id within each cluster.
using ClusterCandidates = std::vector<std::vector<std::size_t>>;

struct GlobalStepResult {
  ClusterModel clusters;
  ClusterCandidates members;     // all bundles per cluster
  ClusterCandidates candidates;  // alpha-filtered survivors per cluster
};

// Number of survivors kept from a cluster of `cluster_size` members.
std::size_t alpha_keep_count(std::size_t cluster_size, double alpha_percent);

// Clusters the configured embedding into budget_per_round clusters and keeps
// the ceil(alpha% x size) most uncertain members of each (at least one).
GlobalStepResult global_step(std::span<const EmbeddingBundle> bundles, const SelectionConfig& cfg,
                             std::uint64_t seed, Exec exec = Exec::parallel);

// Survivors of each membership list, ranked by uncertainty (ties: lower id).
ClusterCandidates filter_by_uncertainty(std::span<const EmbeddingBundle> bundles,
                                        const ClusterCandidates& members, double alpha_percent);

struct DomainCentroid {
  int cluster = 0;
  int domain = 0;
  std::vector<double> mean_vec;
  std::size_t count = 0;
};

// Mean vector per (cluster, domain) group that has members, ordered by
// (cluster, domain).
std::vector<DomainCentroid> domain_statistics(const Matrix& features, std::span<const int> domains,
                                              std::span<const int> assignments, int n_clusters,
                                              int n_source_domains);

// Scalar mean / population std of each vector's entries, compared as
//   standardized: |mu_s / sqrt(var_s + eps) - mu_t / sqrt(var_t + eps)|
//   mean_only:    |mu_s - mu_t|
//   wasserstein:  (mu_s - mu_t)^2 + var_s + var_t - 2 sigma_s sigma_t
double pair_distance(std::span<const double> centroid_vec, std::span<const double> target_vec,
                     DistanceMode mode, double epsilon);

// Same quantity from precomputed moments.
double moment_distance(double mean_s, double std_s, double mean_t, double std_t, DistanceMode mode,
                       double epsilon);

double aggregate_distance(std::span<const double> per_domain, AggregationMode mode);

struct CandidateScore {
  std::size_t sample_id = 0;
  int cluster = 0;
  double uncertainty = 0.0;
  double domain_distance = 0.0;
  double v = 0.0;
};

struct SelectionResult {
  int round = 0;
  std::vector<std::size_t> selected_ids;  // one per cluster, cluster order
  std::vector<CandidateScore> scores;     // cluster order, then candidate order
};

// Normalizes distances by their round-wide maximum, forms
// v = uncertainty * distance / max_distance and takes the per-cluster argmax
// (lowest id on ties). `uncertainty` and `distance` are flat arrays aligned with
// the concatenation of `candidates`; `sample_ids` maps candidate positions to
// sample ids. When every distance is zero the normalized distance is 1.
SelectionResult pick_per_cluster(const ClusterCandidates& candidates, std::span<const std::size_t> sample_ids,
                                 std::span<const double> uncertainty, std::span<const double> distance,
                                 int round);

// Local step. source_vectors / source_domains / source_assignments describe
// the source samples in the local embedding space.
SelectionResult local_step(const ClusterCandidates& candidates, std::span<const EmbeddingBundle> target_bundles,
                           const Matrix& source_vectors, std::span<const int> source_domains,
                           std::span<const int> source_assignments, int n_source_domains,
                           const SelectionConfig& cfg, int round, Exec exec = Exec::parallel);

// Cluster centres in the local embedding space: the global-step centroids when
// both steps share a space, otherwise the mean local embedding of each
// cluster's target members.
Matrix local_space_centroids(std::span<const EmbeddingBundle> target_bundles, const GlobalStepResult& global,
                             const SelectionConfig& cfg);

// One GALA round from precomputed embeddings.
SelectionResult select_from_bundles(std::span<const EmbeddingBundle> target_bundles,
                                    std::span<const EmbeddingBundle> source_bundles,
                                    std::span<const int> source_domains, int n_source_domains,
                                    const SelectionConfig& cfg, int round, Exec exec = Exec::parallel);

// Seed used by the round-r clustering.
std::uint64_t round_seed(const SelectionConfig& cfg, int round);

// embed_all -> global_step -> source assignment -> domain_statistics -> local_step.
SelectionResult select_round(const LabeledPool& pool, const ModelState& model, const Dataset& ds,
                             const SelectionConfig& cfg, int round, Exec exec = Exec::parallel);

enum class BaselineStrategy { random, entropy, margin, badge };
std::string_view to_string(BaselineStrategy s);

double prediction_entropy(std::span<const double> probs);
double prediction_margin(std::span<const double> probs);

std::vector<std::size_t> baseline_select(BaselineStrategy strategy, const LabeledPool& pool,
                                         const ModelState& model, const Dataset& ds, int budget,
                                         std::uint64_t seed, Exec exec = Exec::parallel);

// Baselines from precomputed bundles of the remaining pool.
std::vector<std::size_t> baseline_from_bundles(BaselineStrategy strategy,
                                               std::span<const EmbeddingBundle> bundles, int budget,
                                               std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace gala
