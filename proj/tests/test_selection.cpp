#include <doctest.h>

#include <map>
#include <set>

#include "gala/selection.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace gala;

namespace {
ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gala::Error");
  return ErrorCode::Io;
}

EmbeddingBundle bundle(std::size_t id, double u) {
  EmbeddingBundle b;
  b.sample_id = id;
  b.uncertainty = u;
  b.feature = {u};
  b.grad_embed = {u};
  b.probs = {0.5, 0.5};
  return b;
}

SelectionConfig random_config(Rng& rng, int budget) {
  SelectionConfig c;
  c.budget_per_round = budget;
  c.rounds = 1;
  c.alpha_percent = std::vector<double>{20, 40, 60, 80, 100, 33.3}[rng.index(6)];
  c.distance_mode = std::vector<DistanceMode>{DistanceMode::standardized, DistanceMode::mean_only,
                                              DistanceMode::wasserstein}[rng.index(3)];
  c.aggregation_mode = rng.index(2) ? AggregationMode::minimum : AggregationMode::average;
  c.global_embedding = rng.index(2) ? EmbeddingSpace::gradient : EmbeddingSpace::feature;
  c.local_embedding = rng.index(2) ? EmbeddingSpace::gradient : EmbeddingSpace::feature;
  c.rng_seed = rng.next();
  return c;
}
}  // namespace

TEST_CASE("alpha keep counts") {
  CHECK(alpha_keep_count(10, 60) == 6);
  CHECK(alpha_keep_count(7, 60) == 5);
  CHECK(alpha_keep_count(3, 20) == 1);
  CHECK(alpha_keep_count(1, 1) == 1);
  CHECK(alpha_keep_count(9, 100) == 9);
  CHECK(alpha_keep_count(0, 60) == 0);
}

TEST_CASE("uncertainty filter equals a sort oracle") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.index(30);
    std::vector<EmbeddingBundle> bs;
    for (std::size_t i = 0; i < n; ++i) bs.push_back(bundle(100 - i, static_cast<double>(rng.index(6))));
    ClusterCandidates members{{}};
    for (std::size_t i = 0; i < n; ++i) members[0].push_back(i);
    const double alpha = 1.0 + rng.index(100);
    const auto kept = filter_by_uncertainty(bs, members, alpha)[0];

    std::vector<std::pair<double, std::size_t>> ranked;
    for (const auto& b : bs) ranked.emplace_back(-b.uncertainty, b.sample_id);
    std::sort(ranked.begin(), ranked.end());
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(alpha * n / 100.0)));
    std::set<std::size_t> expect;
    for (std::size_t i = 0; i < k; ++i) expect.insert(ranked[i].second);
    std::set<std::size_t> got;
    for (auto p : kept) got.insert(bs[p].sample_id);
    CHECK(got == expect);
    for (std::size_t i = 1; i < kept.size(); ++i) CHECK(bs[kept[i - 1]].sample_id < bs[kept[i]].sample_id);
  }
}

TEST_CASE("domain statistics equal a group-by oracle") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.index(40), d = 1 + rng.index(4);
    const int nb = 1 + static_cast<int>(rng.index(4)), k = 1 + static_cast<int>(rng.index(3));
    const auto x = testutil::random_matrix(rng, n, d);
    std::vector<int> dom(n), asg(n);
    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
      dom[i] = static_cast<int>(rng.index(k));
      asg[i] = static_cast<int>(rng.index(nb));
      groups[{asg[i], dom[i]}].push_back(i);
    }
    const auto stats = domain_statistics(x, dom, asg, nb, k);
    REQUIRE(stats.size() == groups.size());
    std::size_t s = 0;
    for (const auto& [key, rows] : groups) {
      CHECK(stats[s].cluster == key.first);
      CHECK(stats[s].domain == key.second);
      CHECK(stats[s].count == rows.size());
      for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (auto r : rows) m += x(r, j);
        CHECK(stats[s].mean_vec[j] == doctest::Approx(m / rows.size()).epsilon(1e-12));
      }
      ++s;
    }
  }
}

TEST_CASE("pair distance modes") {
  const std::vector<double> a{1, 3}, b{2, 2};
  // a: mean 2, std 1; b: mean 2, std 0.
  CHECK(pair_distance(a, b, DistanceMode::mean_only, 1e-5) == 0.0);
  CHECK(pair_distance(a, b, DistanceMode::standardized, 1e-5) ==
        doctest::Approx(std::abs(2 / std::sqrt(1 + 1e-5) - 2 / std::sqrt(1e-5))));
  CHECK(pair_distance(a, b, DistanceMode::wasserstein, 1e-5) == doctest::Approx(1.0));
  // One-dimensional vectors have zero spread; epsilon keeps the ratio finite.
  const std::vector<double> one{0.5}, two{0.25};
  CHECK(pair_distance(one, two, DistanceMode::standardized, 1e-4) == doctest::Approx(25.0));
  CHECK(code_of([&] { pair_distance(a, one, DistanceMode::mean_only, 1e-5); }) == ErrorCode::DimMismatch);
}

TEST_CASE("wasserstein form agrees with the variance expansion") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto x = testutil::random_matrix(rng, 2, 1 + rng.index(6), 2.0);
    double ms, ss, mt, st;
    oracle::moments({x.row(0).begin(), x.row(0).end()}, ms, ss);
    oracle::moments({x.row(1).begin(), x.row(1).end()}, mt, st);
    const double expanded = (ms - mt) * (ms - mt) + ss * ss + st * st - 2 * ss * st;
    CHECK(pair_distance(x.row(0), x.row(1), DistanceMode::wasserstein, 1e-5) ==
          doctest::Approx(expanded).epsilon(1e-9));
    CHECK(pair_distance(x.row(0), x.row(1), DistanceMode::wasserstein, 1e-5) >= 0.0);
  }
}

TEST_CASE("aggregation") {
  const std::vector<double> v{3, 1, 2};
  CHECK(aggregate_distance(v, AggregationMode::minimum) == 1.0);
  CHECK(aggregate_distance(v, AggregationMode::average) == 2.0);
  CHECK(code_of([] { aggregate_distance(std::vector<double>{}, AggregationMode::minimum); }) ==
        ErrorCode::EmptyList);
}

TEST_CASE("per-cluster pick normalizes round-wide and breaks ties by id") {
  const ClusterCandidates cands{{0, 1}, {2}};
  const std::vector<std::size_t> ids{7, 3, 9};
  const std::vector<double> u{1.0, 2.0, 5.0}, d{4.0, 1.0, 2.0};
  const auto r = pick_per_cluster(cands, ids, u, d, 3);
  CHECK(r.round == 3);
  CHECK(r.selected_ids == std::vector<std::size_t>{7, 9});
  CHECK(r.scores[0].v == doctest::Approx(1.0));
  CHECK(r.scores[1].v == doctest::Approx(0.5));
  CHECK(r.scores[2].v == doctest::Approx(2.5));

  const std::vector<double> zero{0.0, 0.0, 0.0}, same{1.0, 1.0, 1.0};
  const auto z = pick_per_cluster(cands, ids, u, zero, 1);
  CHECK(z.selected_ids == std::vector<std::size_t>{3, 9});
  const auto tie = pick_per_cluster(cands, ids, same, same, 1);
  CHECK(tie.selected_ids == std::vector<std::size_t>{3, 9});
}

TEST_CASE("scaling distances or uncertainties leaves the pick unchanged") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    ClusterCandidates cands;
    std::vector<std::size_t> ids;
    std::vector<double> u, d;
    const int nb = 1 + static_cast<int>(rng.index(5));
    for (int b = 0; b < nb; ++b) {
      cands.emplace_back();
      for (std::size_t i = 0, n = 1 + rng.index(6); i < n; ++i) {
        cands.back().push_back(ids.size());
        ids.push_back(ids.size());
        u.push_back(static_cast<double>(rng.index(4)) * 0.5);
        d.push_back(static_cast<double>(rng.index(4)) * 0.25);
      }
    }
    const auto base = pick_per_cluster(cands, ids, u, d, 1).selected_ids;
    for (double lambda : {0.5, 3.0, 1024.0}) {
      auto ds = d, us = u;
      for (double& x : ds) x *= lambda;
      for (double& x : us) x *= lambda;
      CHECK(pick_per_cluster(cands, ids, u, ds, 1).selected_ids == base);
      CHECK(pick_per_cluster(cands, ids, us, d, 1).selected_ids == base);
    }
  }
}

TEST_CASE("select_round matches the brute-force oracle") {
  Rng rng(5);
  for (int t = 0; t < 25; ++t) {
    const int k = 1 + static_cast<int>(rng.index(3)), c = 2 + static_cast<int>(rng.index(3));
    const int n_t = 5 + static_cast<int>(rng.index(40));
    const std::size_t d = 1 + rng.index(5);
    const auto ds = testutil::random_dataset(rng, k, 1 + static_cast<int>(rng.index(15)), n_t, d, c);
    const auto m = testutil::random_model(rng, d, rng.index(4), c);
    const auto cfg = random_config(rng, 1 + static_cast<int>(rng.index(5)));
    const auto pool = LabeledPool::for_targets(ds);
    const int round = 1 + static_cast<int>(rng.index(5));
    const auto got = select_round(pool, m, ds, cfg, round, Exec::serial);
    CHECK(got.selected_ids == oracle::select_round(pool, m, ds, cfg, round));
    CHECK(got.selected_ids.size() == static_cast<std::size_t>(cfg.budget_per_round));
  }
}

TEST_CASE("selection is identical in serial and parallel") {
  Rng rng(6);
  const auto ds = testutil::random_dataset(rng, 3, 40, 200, 6, 4);
  const auto m = testutil::random_model(rng, 6, 5, 4);
  SelectionConfig cfg;
  const auto pool = LabeledPool::for_targets(ds);
  const auto a = select_round(pool, m, ds, cfg, 1, Exec::serial);
  const auto b = select_round(pool, m, ds, cfg, 1, Exec::parallel);
  CHECK(a.selected_ids == b.selected_ids);
  CHECK(a.scores.size() == b.scores.size());
}

TEST_CASE("budget equal to the pool selects every target") {
  Rng rng(7);
  const auto ds = testutil::random_dataset(rng, 2, 10, 6, 3, 3);
  const auto m = testutil::random_model(rng, 3, 0, 3);
  SelectionConfig cfg;
  cfg.budget_per_round = 6;
  auto got = select_round(LabeledPool::for_targets(ds), m, ds, cfg, 1).selected_ids;
  std::sort(got.begin(), got.end());
  CHECK(got == ds.target_rows());
}

TEST_CASE("alpha candidate sets are nested") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto ds = testutil::random_dataset(rng, 2, 5, 30, 3, 3);
    const auto m = testutil::random_model(rng, 3, 2, 3);
    const auto bs = embed_all(m, ds, ds.target_rows());
    SelectionConfig lo, hi;
    lo.budget_per_round = hi.budget_per_round = 3;
    lo.alpha_percent = 1.0 + rng.index(100);
    hi.alpha_percent = std::min(100.0, lo.alpha_percent + rng.index(60));
    const auto a = global_step(bs, lo, 11);
    const auto b = global_step(bs, hi, 11);
    for (std::size_t c = 0; c < a.candidates.size(); ++c)
      CHECK(std::includes(b.candidates[c].begin(), b.candidates[c].end(), a.candidates[c].begin(),
                          a.candidates[c].end()));
  }
}

TEST_CASE("selection errors") {
  Rng rng(9);
  auto ds = testutil::random_dataset(rng, 1, 4, 3, 2, 2);
  const auto m = testutil::random_model(rng, 2, 0, 2);
  SelectionConfig cfg;
  cfg.budget_per_round = 4;
  CHECK(code_of([&] { select_round(LabeledPool::for_targets(ds), m, ds, cfg, 1); }) == ErrorCode::TooFewTargets);
  const auto bs = embed_all(m, ds, ds.target_rows());
  cfg.budget_per_round = 2;
  CHECK(code_of([&] { select_from_bundles(bs, {}, {}, 1, cfg, 1); }) == ErrorCode::NoSourceStats);
}

TEST_CASE("entropy and margin baselines equal sort oracles") {
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const auto ds = testutil::random_dataset(rng, 1, 2, 25, 3, 4);
    const auto m = testutil::random_model(rng, 3, 3, 4);
    const auto pool = LabeledPool::for_targets(ds);
    const int budget = 1 + static_cast<int>(rng.index(6));
    std::vector<std::tuple<double, double, std::size_t>> scored;
    for (auto r : pool.remaining()) {
      const auto p = testutil::naive_forward(m, ds.features.row(r)).probs;
      double h = 0.0;
      for (double x : p) h -= x > 0 ? x * std::log(x) : 0.0;
      auto q = p;
      std::sort(q.rbegin(), q.rend());
      scored.emplace_back(h, q[0] - q[1], r);
    }
    auto by_entropy = scored;
    std::stable_sort(by_entropy.begin(), by_entropy.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    auto by_margin = scored;
    std::stable_sort(by_margin.begin(), by_margin.end(),
                     [](const auto& a, const auto& b) { return std::get<1>(a) < std::get<1>(b); });
    const auto e = baseline_select(BaselineStrategy::entropy, pool, m, ds, budget, 1);
    const auto g = baseline_select(BaselineStrategy::margin, pool, m, ds, budget, 1);
    for (int i = 0; i < budget; ++i) {
      CHECK(e[i] == std::get<2>(by_entropy[i]));
      CHECK(g[i] == std::get<2>(by_margin[i]));
    }
  }
}

TEST_CASE("random and badge baselines pick distinct pool ids deterministically") {
  Rng rng(11);
  const auto ds = testutil::random_dataset(rng, 2, 5, 40, 4, 3);
  const auto m = testutil::random_model(rng, 4, 3, 3);
  auto pool = LabeledPool::for_targets(ds);
  const std::vector<std::size_t> first{ds.target_rows()[0], ds.target_rows()[5]};
  pool.annotate(first);
  for (auto s : {BaselineStrategy::random, BaselineStrategy::badge}) {
    const auto a = baseline_select(s, pool, m, ds, 8, 99);
    const auto b = baseline_select(s, pool, m, ds, 8, 99);
    CHECK(a == b);
    std::set<std::size_t> u(a.begin(), a.end());
    CHECK(u.size() == 8);
    for (auto id : a) CHECK(std::binary_search(pool.remaining().begin(), pool.remaining().end(), id));
  }
  CHECK(code_of([&] { baseline_select(BaselineStrategy::entropy, pool, m, ds, 100, 1); }) ==
        ErrorCode::TooFewTargets);
}

TEST_CASE("margin and entropy examples") {
  CHECK(prediction_margin(std::vector<double>{0.5, 0.3, 0.2}) == doctest::Approx(0.2));
  CHECK(prediction_entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK(prediction_entropy(std::vector<double>{1.0, 0.0}) == 0.0);
}
