#include "gala/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gala {

namespace {

// Fills empty clusters by moving, from the currently largest cluster, the
// point farthest from its centroid; the moved point becomes the new centroid.
void repair_empty(const Matrix& points, Matrix& centroids, std::vector<int>& assign) {
  const auto k = static_cast<int>(centroids.rows());
  std::vector<std::size_t> counts(k, 0);
  for (int a : assign) ++counts[a];
  for (int e = 0; e < k; ++e) {
    if (counts[e] > 0) continue;
    int donor = 0;
    for (int c = 1; c < k; ++c)
      if (counts[c] > counts[donor]) donor = c;
    std::size_t far = points.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (assign[i] != donor) continue;
      const double d = kernels::squared_distance(points.row(i), centroids.row(donor));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assign[far] = e;
    --counts[donor];
    counts[e] = 1;
    std::copy(points.row(far).begin(), points.row(far).end(), centroids.row(e).begin());
  }
}

// Hartigan-style transfers: move a point to another cluster whenever that
// lowers J once both means are updated. Returns the number of moves.
std::size_t refine_transfers(const Matrix& points, Matrix& centroids, std::vector<int>& assign,
                             int max_passes, double objective) {
  const auto k = static_cast<int>(centroids.rows());
  const std::size_t d = points.cols();
  std::vector<std::size_t> counts(k, 0);
  for (int a : assign) ++counts[a];
  const double min_gain = 1e-12 * std::max(objective, 1e-300);
  std::size_t total = 0;
  for (int pass = 0; pass < max_passes; ++pass) {
    std::size_t moves = 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      const int from = assign[i];
      if (counts[from] < 2) continue;
      const auto x = points.row(i);
      const double nf = static_cast<double>(counts[from]);
      const double remove_gain = nf / (nf - 1.0) * kernels::squared_distance(x, centroids.row(from));
      int best = -1;
      double best_cost = remove_gain;
      for (int c = 0; c < k; ++c) {
        if (c == from) continue;
        const double nc = static_cast<double>(counts[c]);
        const double cost = nc / (nc + 1.0) * kernels::squared_distance(x, centroids.row(c));
        if (cost < best_cost) {
          best_cost = cost;
          best = c;
        }
      }
      if (best < 0 || remove_gain - best_cost <= min_gain) continue;
      const double nb = static_cast<double>(counts[best]);
      auto cf = centroids.row(from);
      auto cb = centroids.row(best);
      for (std::size_t j = 0; j < d; ++j) {
        cf[j] = (cf[j] * nf - x[j]) / (nf - 1.0);
        cb[j] = (cb[j] * nb + x[j]) / (nb + 1.0);
      }
      --counts[from];
      ++counts[best];
      assign[i] = best;
      ++moves;
    }
    total += moves;
    if (moves == 0) break;
  }
  return total;
}

}  // namespace

double kmeans_objective(const Matrix& points, const Matrix& centroids, std::span<const int> assignments) {
  double j = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    j += kernels::squared_distance(points.row(i), centroids.row(assignments[i]));
  return j;
}

Matrix cluster_means(const Matrix& points, std::span<const int> assignments, int n_clusters) {
  Matrix sums(n_clusters, points.cols());
  std::vector<std::size_t> counts(n_clusters, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto s = sums.row(assignments[i]);
    const auto p = points.row(i);
    for (std::size_t j = 0; j < p.size(); ++j) s[j] += p[j];
    ++counts[assignments[i]];
  }
  for (int c = 0; c < n_clusters; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : sums.row(c)) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

std::vector<int> assign_to_clusters(const Matrix& points, const Matrix& centroids, Exec exec) {
  if (centroids.rows() == 0) throw Error(ErrorCode::DimMismatch, "no centroids");
  if (points.rows() > 0 && points.cols() != centroids.cols())
    throw Error(ErrorCode::DimMismatch, "point and centroid dimensions differ");
  std::vector<int> out(points.rows());
  std::vector<double> d2(points.rows());
  kernels::nearest_centroid(points, centroids, out, d2, exec);
  return out;
}

std::vector<std::size_t> kmeanspp_seed(const Matrix& points, int k, Rng& rng, Exec exec) {
  const std::size_t n = points.rows();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw Error(ErrorCode::TooFewPoints, "cannot seed " + std::to_string(k) + " centers from " +
                                             std::to_string(n) + " points");
  std::vector<std::size_t> picks;
  std::vector<char> taken(n, 0);
  picks.push_back(rng.index(n));
  taken[picks[0]] = 1;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  kernels::relax_min_distance(points, points.row(picks[0]), d2, exec);
  while (picks.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) total += d2[i];
    std::size_t next = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || d2[i] <= 0.0) continue;
        acc += d2[i];
        next = i;
        if (acc > target) break;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) {
          next = i;
          break;
        }
    }
    picks.push_back(next);
    taken[next] = 1;
    kernels::relax_min_distance(points, points.row(next), d2, exec);
  }
  return picks;
}

ClusterModel kmeans(const Matrix& points, int n_clusters, const KMeansOptions& opts) {
  const std::size_t n = points.rows();
  if (n_clusters < 1 || n < static_cast<std::size_t>(n_clusters))
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(n) + " points for " + std::to_string(n_clusters) + " clusters");
  if (points.cols() == 0) throw Error(ErrorCode::DegenerateDim, "points have zero dimension");
  for (double v : points.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite point coordinate");

  // Canonical order: lexicographic by coordinates.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = points.row(a);
    const auto rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  Matrix p(n, points.cols());
  for (std::size_t i = 0; i < n; ++i) std::copy(points.row(order[i]).begin(), points.row(order[i]).end(), p.row(i).begin());

  Rng rng(opts.seed);
  const auto seeds = kmeanspp_seed(p, n_clusters, rng, opts.exec);
  Matrix centroids(n_clusters, p.cols());
  for (int c = 0; c < n_clusters; ++c)
    std::copy(p.row(seeds[c]).begin(), p.row(seeds[c]).end(), centroids.row(c).begin());

  ClusterModel out;
  std::vector<int> assign(n);
  std::vector<double> d2(n);
  kernels::nearest_centroid(p, centroids, assign, d2, opts.exec);
  repair_empty(p, centroids, assign);
  double j = kmeans_objective(p, centroids, assign);
  out.objective_trace.push_back(j);

  std::vector<int> next(n);
  for (int it = 0; it < opts.max_iters; ++it) {
    ++out.iterations;
    centroids = cluster_means(p, assign, n_clusters);
    const double j_update = kmeans_objective(p, centroids, assign);
    out.objective_trace.push_back(j_update);
    kernels::nearest_centroid(p, centroids, next, d2, opts.exec);
    repair_empty(p, centroids, next);
    const bool changed = next != assign;
    assign.swap(next);
    const double j_new = kmeans_objective(p, centroids, assign);
    out.objective_trace.push_back(j_new);
    const double prev = j;
    j = j_new;
    if (!changed) break;
    if (prev - j <= opts.tol * prev) break;
  }
  centroids = cluster_means(p, assign, n_clusters);
  j = kmeans_objective(p, centroids, assign);
  out.objective_trace.push_back(j);

  if (n_clusters > 1 && refine_transfers(p, centroids, assign, opts.max_iters, j) > 0) {
    centroids = cluster_means(p, assign, n_clusters);
    j = kmeans_objective(p, centroids, assign);
    out.objective_trace.push_back(j);
  }

  out.centroids = std::move(centroids);
  out.objective = j;
  out.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.assignments[order[i]] = assign[i];
  return out;
}

}  // namespace gala
