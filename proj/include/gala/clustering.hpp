#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gala/kernels.hpp"
#include "gala/rng.hpp"
#include "gala/types.hpp"

namespace gala {

struct ClusterModel {
  Matrix centroids;              // B x dim
  std::vector<int> assignments;  // one per input point, in input order
  double objective = 0.0;        // sum of squared distances to assigned centroid
  std::vector<double> objective_trace;  // J after every assignment/update/refinement step
  int iterations = 0;
};

struct KMeansOptions {
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;
};

// k-means++ seeding followed by Lloyd iterations and a single-point transfer
// refinement. Points are processed in a canonical (lexicographic) order, so
// permuting the input permutes `assignments` and leaves everything else
// bitwise unchanged. Every returned cluster is non-empty.
ClusterModel kmeans(const Matrix& points, int n_clusters, const KMeansOptions& opts = {});

// Nearest centroid per point, lowest index on ties.
std::vector<int> assign_to_clusters(const Matrix& points, const Matrix& centroids,
                                    Exec exec = Exec::parallel);

double kmeans_objective(const Matrix& points, const Matrix& centroids, std::span<const int> assignments);

// Mean of the points assigned to each cluster; clusters without members keep
// a zero row.
Matrix cluster_means(const Matrix& points, std::span<const int> assignments, int n_clusters);

// k-means++ D^2 seeding: `k` distinct row indices. The first pick is uniform;
// when all remaining D^2 mass is zero the lowest unpicked index is taken.
std::vector<std::size_t> kmeanspp_seed(const Matrix& points, int k, Rng& rng,
                                       Exec exec = Exec::parallel);

}  // namespace gala
