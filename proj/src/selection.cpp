#include "gala/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gala/rng.hpp"

namespace gala {

std::size_t alpha_keep_count(std::size_t cluster_size, double alpha_percent) {
  if (cluster_size == 0) return 0;
  const double raw = std::ceil(alpha_percent * static_cast<double>(cluster_size) / 100.0);
  const auto keep = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(keep, cluster_size);
}

ClusterCandidates filter_by_uncertainty(std::span<const EmbeddingBundle> bundles,
                                        const ClusterCandidates& members, double alpha_percent) {
  ClusterCandidates out(members.size());
  for (std::size_t b = 0; b < members.size(); ++b) {
    std::vector<std::size_t> ranked = members[b];
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t x, std::size_t y) {
      if (bundles[x].uncertainty != bundles[y].uncertainty)
        return bundles[x].uncertainty > bundles[y].uncertainty;
      return bundles[x].sample_id < bundles[y].sample_id;
    });
    ranked.resize(alpha_keep_count(ranked.size(), alpha_percent));
    std::sort(ranked.begin(), ranked.end(),
              [&](std::size_t x, std::size_t y) { return bundles[x].sample_id < bundles[y].sample_id; });
    out[b] = std::move(ranked);
  }
  return out;
}

GlobalStepResult global_step(std::span<const EmbeddingBundle> bundles, const SelectionConfig& cfg,
                             std::uint64_t seed, Exec exec) {
  cfg.validate();
  const auto n_clusters = cfg.budget_per_round;
  if (bundles.size() < static_cast<std::size_t>(n_clusters))
    throw Error(ErrorCode::TooFewTargets, std::to_string(bundles.size()) + " targets for budget " +
                                              std::to_string(n_clusters));
  GlobalStepResult out;
  const Matrix points = stack_embeddings(bundles, cfg.global_embedding);
  out.clusters = kmeans(points, n_clusters, {cfg.kmeans_max_iters, cfg.kmeans_tol, seed, exec});

  out.members.assign(n_clusters, {});
  for (std::size_t i = 0; i < bundles.size(); ++i) out.members[out.clusters.assignments[i]].push_back(i);
  for (auto& m : out.members)
    std::sort(m.begin(), m.end(),
              [&](std::size_t x, std::size_t y) { return bundles[x].sample_id < bundles[y].sample_id; });
  out.candidates = filter_by_uncertainty(bundles, out.members, cfg.alpha_percent);
  return out;
}

std::vector<DomainCentroid> domain_statistics(const Matrix& features, std::span<const int> domains,
                                              std::span<const int> assignments, int n_clusters,
                                              int n_source_domains) {
  const std::size_t groups = static_cast<std::size_t>(n_clusters) * static_cast<std::size_t>(n_source_domains);
  std::vector<std::vector<double>> sums(groups);
  std::vector<std::size_t> counts(groups, 0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const std::size_t g = static_cast<std::size_t>(assignments[i]) * n_source_domains + domains[i];
    auto& s = sums[g];
    if (s.empty()) s.assign(features.cols(), 0.0);
    const auto row = features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) s[j] += row[j];
    ++counts[g];
  }
  std::vector<DomainCentroid> out;
  for (std::size_t g = 0; g < groups; ++g) {
    if (counts[g] == 0) continue;
    DomainCentroid dc;
    dc.cluster = static_cast<int>(g / n_source_domains);
    dc.domain = static_cast<int>(g % n_source_domains);
    dc.count = counts[g];
    dc.mean_vec = std::move(sums[g]);
    for (double& v : dc.mean_vec) v /= static_cast<double>(counts[g]);
    out.push_back(std::move(dc));
  }
  return out;
}

double moment_distance(double mean_s, double std_s, double mean_t, double std_t, DistanceMode mode,
                       double epsilon) {
  switch (mode) {
    case DistanceMode::standardized:
      return std::abs(mean_s / std::sqrt(std_s * std_s + epsilon) - mean_t / std::sqrt(std_t * std_t + epsilon));
    case DistanceMode::mean_only:
      return std::abs(mean_s - mean_t);
    case DistanceMode::wasserstein: {
      // var_s + var_t - 2 sigma_s sigma_t written as a square so it cannot round negative.
      const double dm = mean_s - mean_t;
      const double ds = std_s - std_t;
      return dm * dm + ds * ds;
    }
  }
  return 0.0;
}

double pair_distance(std::span<const double> centroid_vec, std::span<const double> target_vec,
                     DistanceMode mode, double epsilon) {
  if (centroid_vec.size() != target_vec.size())
    throw Error(ErrorCode::DimMismatch, "centroid and target dimensions differ");
  if (centroid_vec.empty()) throw Error(ErrorCode::DimMismatch, "empty vectors");
  double ms = 0, ss = 0, mt = 0, st = 0;
  kernels::vector_moments(centroid_vec, ms, ss);
  kernels::vector_moments(target_vec, mt, st);
  return moment_distance(ms, ss, mt, st, mode, epsilon);
}

double aggregate_distance(std::span<const double> per_domain, AggregationMode mode) {
  if (per_domain.empty()) throw Error(ErrorCode::EmptyList, "no per-domain distances");
  if (mode == AggregationMode::minimum) return *std::min_element(per_domain.begin(), per_domain.end());
  double s = 0.0;
  for (double d : per_domain) s += d;
  return s / static_cast<double>(per_domain.size());
}

SelectionResult pick_per_cluster(const ClusterCandidates& candidates, std::span<const std::size_t> sample_ids,
                                 std::span<const double> uncertainty, std::span<const double> distance,
                                 int round) {
  std::size_t total = 0;
  for (const auto& c : candidates) total += c.size();
  if (sample_ids.size() != total || uncertainty.size() != total || distance.size() != total)
    throw Error(ErrorCode::ShapeMismatch, "score arrays must align with the candidate lists");

  double max_d = 0.0;
  for (double d : distance) max_d = std::max(max_d, d);

  SelectionResult out;
  out.round = round;
  out.scores.reserve(total);
  std::size_t flat = 0;
  for (std::size_t b = 0; b < candidates.size(); ++b) {
    if (candidates[b].empty())
      throw Error(ErrorCode::TooFewTargets, "cluster " + std::to_string(b) + " has no candidates");
    std::size_t best = flat;
    for (std::size_t i = 0; i < candidates[b].size(); ++i, ++flat) {
      CandidateScore s;
      s.sample_id = sample_ids[flat];
      s.cluster = static_cast<int>(b);
      s.uncertainty = uncertainty[flat];
      s.domain_distance = distance[flat];
      const double normalized = max_d > 0.0 ? distance[flat] / max_d : 1.0;
      s.v = uncertainty[flat] * normalized;
      out.scores.push_back(s);
      const auto& cur = out.scores.back();
      const auto& top = out.scores[best];
      if (cur.v > top.v || (cur.v == top.v && cur.sample_id < top.sample_id)) best = flat;
    }
    out.selected_ids.push_back(out.scores[best].sample_id);
  }
  return out;
}

SelectionResult local_step(const ClusterCandidates& candidates, std::span<const EmbeddingBundle> target_bundles,
                           const Matrix& source_vectors, std::span<const int> source_domains,
                           std::span<const int> source_assignments, int n_source_domains,
                           const SelectionConfig& cfg, int round, Exec exec) {
  if (source_vectors.rows() == 0) throw Error(ErrorCode::NoSourceStats, "no source samples");
  if (source_domains.size() != source_vectors.rows() || source_assignments.size() != source_vectors.rows())
    throw Error(ErrorCode::ShapeMismatch, "source arrays are not aligned");
  const int n_clusters = static_cast<int>(candidates.size());

  // Moments of every available (cluster, domain) centroid; clusters without any
  // source member fall back to the per-domain centroids over all sources.
  struct Moment {
    double mean, stddev;
  };
  auto moments_of = [](const std::vector<DomainCentroid>& cs, int cluster) {
    std::vector<Moment> m;
    for (const auto& c : cs) {
      if (c.cluster != cluster) continue;
      Moment mo{};
      kernels::vector_moments(c.mean_vec, mo.mean, mo.stddev);
      m.push_back(mo);
    }
    return m;
  };
  const auto stats = domain_statistics(source_vectors, source_domains, source_assignments, n_clusters,
                                       n_source_domains);
  const std::vector<int> all_zero(source_vectors.rows(), 0);
  const auto global_stats = domain_statistics(source_vectors, source_domains, all_zero, 1, n_source_domains);
  const auto fallback = moments_of(global_stats, 0);
  std::vector<std::vector<Moment>> per_cluster(n_clusters);
  for (int b = 0; b < n_clusters; ++b) {
    per_cluster[b] = moments_of(stats, b);
    if (per_cluster[b].empty()) per_cluster[b] = fallback;
  }

  std::vector<std::size_t> flat_pos;
  for (const auto& c : candidates) flat_pos.insert(flat_pos.end(), c.begin(), c.end());
  std::vector<EmbeddingBundle> picked;
  picked.reserve(flat_pos.size());
  for (auto p : flat_pos) picked.push_back(target_bundles[p]);
  const Matrix target_vecs = stack_embeddings(picked, cfg.local_embedding);
  if (target_vecs.rows() > 0 && target_vecs.cols() != source_vectors.cols())
    throw Error(ErrorCode::DimMismatch, "target and source local embeddings differ in dimension");

  std::vector<double> t_mean(flat_pos.size()), t_std(flat_pos.size());
  kernels::row_moments(target_vecs, t_mean, t_std, exec);

  std::vector<std::size_t> ids(flat_pos.size());
  std::vector<double> unc(flat_pos.size()), dist(flat_pos.size());
  std::size_t flat = 0;
  std::vector<double> per_domain;
  for (int b = 0; b < n_clusters; ++b) {
    for (std::size_t i = 0; i < candidates[b].size(); ++i, ++flat) {
      per_domain.clear();
      for (const auto& m : per_cluster[b])
        per_domain.push_back(
            moment_distance(m.mean, m.stddev, t_mean[flat], t_std[flat], cfg.distance_mode, cfg.epsilon));
      ids[flat] = picked[flat].sample_id;
      unc[flat] = picked[flat].uncertainty;
      dist[flat] = aggregate_distance(per_domain, cfg.aggregation_mode);
    }
  }
  return pick_per_cluster(candidates, ids, unc, dist, round);
}

Matrix local_space_centroids(std::span<const EmbeddingBundle> target_bundles, const GlobalStepResult& global,
                             const SelectionConfig& cfg) {
  if (cfg.global_embedding == cfg.local_embedding) return global.clusters.centroids;
  const Matrix local = stack_embeddings(target_bundles, cfg.local_embedding);
  return cluster_means(local, global.clusters.assignments, static_cast<int>(global.clusters.centroids.rows()));
}

std::uint64_t round_seed(const SelectionConfig& cfg, int round) {
  return mix_seed(cfg.rng_seed, {static_cast<std::uint64_t>(round)});
}

SelectionResult select_from_bundles(std::span<const EmbeddingBundle> target_bundles,
                                    std::span<const EmbeddingBundle> source_bundles,
                                    std::span<const int> source_domains, int n_source_domains,
                                    const SelectionConfig& cfg, int round, Exec exec) {
  if (source_bundles.empty()) throw Error(ErrorCode::NoSourceStats, "no source samples");
  const auto global = global_step(target_bundles, cfg, round_seed(cfg, round), exec);
  const Matrix centroids = local_space_centroids(target_bundles, global, cfg);
  const Matrix source_vecs = stack_embeddings(source_bundles, cfg.local_embedding);
  const auto source_assign = assign_to_clusters(source_vecs, centroids, exec);
  return local_step(global.candidates, target_bundles, source_vecs, source_domains, source_assign,
                    n_source_domains, cfg, round, exec);
}

SelectionResult select_round(const LabeledPool& pool, const ModelState& model, const Dataset& ds,
                             const SelectionConfig& cfg, int round, Exec exec) {
  cfg.validate();
  if (pool.remaining().size() < static_cast<std::size_t>(cfg.budget_per_round))
    throw Error(ErrorCode::TooFewTargets, "unlabeled pool smaller than the round budget");
  const auto targets = embed_all(model, ds, pool.remaining(), exec);
  const auto source_rows = ds.source_rows();
  const auto sources = embed_all(model, ds, source_rows, exec);
  std::vector<int> source_domains(source_rows.size());
  for (std::size_t i = 0; i < source_rows.size(); ++i) source_domains[i] = ds.domains[source_rows[i]];
  return select_from_bundles(targets, sources, source_domains, ds.n_source_domains, cfg, round, exec);
}

std::string_view to_string(BaselineStrategy s) {
  switch (s) {
    case BaselineStrategy::random: return "random";
    case BaselineStrategy::entropy: return "entropy";
    case BaselineStrategy::margin: return "margin";
    case BaselineStrategy::badge: return "badge";
  }
  return "?";
}

double prediction_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double prediction_margin(std::span<const double> probs) {
  double top1 = -1.0, top2 = -1.0;
  for (double p : probs) {
    if (p > top1) {
      top2 = top1;
      top1 = p;
    } else if (p > top2) {
      top2 = p;
    }
  }
  return top2 < 0.0 ? top1 : top1 - top2;
}

std::vector<std::size_t> baseline_from_bundles(BaselineStrategy strategy,
                                               std::span<const EmbeddingBundle> bundles, int budget,
                                               std::uint64_t seed, Exec exec) {
  if (budget < 1 || bundles.size() < static_cast<std::size_t>(budget))
    throw Error(ErrorCode::TooFewTargets, "unlabeled pool smaller than the round budget");
  const auto k = static_cast<std::size_t>(budget);
  std::vector<std::size_t> pos(bundles.size());
  std::iota(pos.begin(), pos.end(), 0);
  std::sort(pos.begin(), pos.end(),
            [&](std::size_t a, std::size_t b) { return bundles[a].sample_id < bundles[b].sample_id; });

  std::vector<std::size_t> picks;
  auto ranked_by = [&](auto score, bool descending) {
    std::vector<double> s(bundles.size());
    for (std::size_t i = 0; i < bundles.size(); ++i) s[i] = score(bundles[i].probs);
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      return descending ? s[a] > s[b] : s[a] < s[b];
    });
    pos.resize(k);
    return pos;
  };
  switch (strategy) {
    case BaselineStrategy::random: {
      Rng rng(seed);
      rng.shuffle(pos.begin(), pos.end());
      pos.resize(k);
      picks = pos;
      break;
    }
    case BaselineStrategy::entropy:
      picks = ranked_by(prediction_entropy, true);
      break;
    case BaselineStrategy::margin:
      picks = ranked_by(prediction_margin, false);
      break;
    case BaselineStrategy::badge: {
      std::vector<EmbeddingBundle> ordered;
      ordered.reserve(pos.size());
      for (auto p : pos) ordered.push_back(bundles[p]);
      const Matrix g = stack_embeddings(ordered, EmbeddingSpace::gradient);
      Rng rng(seed);
      for (auto i : kmeanspp_seed(g, budget, rng, exec)) picks.push_back(pos[i]);
      break;
    }
  }
  std::vector<std::size_t> ids;
  ids.reserve(picks.size());
  for (auto p : picks) ids.push_back(bundles[p].sample_id);
  return ids;
}

std::vector<std::size_t> baseline_select(BaselineStrategy strategy, const LabeledPool& pool,
                                         const ModelState& model, const Dataset& ds, int budget,
                                         std::uint64_t seed, Exec exec) {
  if (budget < 1 || pool.remaining().size() < static_cast<std::size_t>(budget))
    throw Error(ErrorCode::TooFewTargets, "unlabeled pool smaller than the round budget");
  if (strategy == BaselineStrategy::random) {
    std::vector<std::size_t> ids = pool.remaining();
    Rng rng(seed);
    rng.shuffle(ids.begin(), ids.end());
    ids.resize(budget);
    return ids;
  }
  const auto bundles = embed_all(model, ds, pool.remaining(), exec);
  return baseline_from_bundles(strategy, bundles, budget, seed, exec);
}

}  // namespace gala
