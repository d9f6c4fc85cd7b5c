#include <doctest.h>

#include <cmath>
#include <limits>

#include "gala/rng.hpp"
#include "gala/types.hpp"
#include "support.hpp"

using namespace gala;

namespace {

Dataset tiny() {
  Dataset ds;
  ds.n_classes = 3;
  ds.n_source_domains = 2;
  ds.features = Matrix(4, 2, 1.0);
  ds.ids = {10, 11, 12, 13};
  ds.domains = {0, 1, 2, 2};
  ds.labels = {0, 2, kUnlabeled, 1};
  return ds;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gala::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("valid dataset passes and exposes domain views") {
  const auto ds = tiny();
  CHECK_NOTHROW(validate_dataset(ds));
  CHECK(ds.target_domain() == 2);
  CHECK(ds.source_rows() == std::vector<std::size_t>{0, 1});
  CHECK(ds.target_rows() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("dataset validation errors") {
  auto ds = tiny();
  ds.labels.pop_back();
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::BadShape);

  ds = tiny();
  ds.features(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::NonFinite);

  ds = tiny();
  ds.features(0, 0) = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::NonFinite);

  ds = tiny();
  ds.labels[0] = 3;
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::InvalidLabel);

  ds = tiny();
  ds.labels[1] = kUnlabeled;
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::InvalidLabel);

  ds = tiny();
  ds.domains[0] = 3;
  CHECK(code_of([&] { validate_dataset(ds); }) == ErrorCode::BadShape);
}

TEST_CASE("matrix append_row checks width") {
  Matrix m;
  m.append_row(std::vector<double>{1, 2, 3});
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 3);
  CHECK(code_of([&] { m.append_row(std::vector<double>{1, 2}); }) == ErrorCode::BadShape);
}

TEST_CASE("model validation") {
  Rng rng(1);
  auto m = testutil::random_model(rng, 4, 3, 2);
  CHECK_NOTHROW(validate_model(m));
  m.last_bias.push_back(0.0);
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::ShapeMismatch);
  m = testutil::random_model(rng, 4, 0, 2);
  CHECK(m.feature_dim() == 4);
  CHECK(m.input_dim() == 4);
  m.last_weights(0, 0) = std::nan("");
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::NonFinite);
}

TEST_CASE("enum strings round-trip and reject unknown values") {
  for (auto m : {DistanceMode::standardized, DistanceMode::mean_only, DistanceMode::wasserstein})
    CHECK(parse_distance_mode(to_string(m)) == m);
  for (auto m : {AggregationMode::minimum, AggregationMode::average})
    CHECK(parse_aggregation_mode(to_string(m)) == m);
  CHECK(parse_aggregation_mode("average") == AggregationMode::average);
  for (auto m : {EmbeddingSpace::gradient, EmbeddingSpace::feature}) CHECK(parse_embedding_space(to_string(m)) == m);
  CHECK(code_of([] { parse_distance_mode("cosine"); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { parse_embedding_space("logits"); }) == ErrorCode::BadConfig);
}

TEST_CASE("selection config ranges and budget") {
  SelectionConfig c;
  CHECK_NOTHROW(c.validate(50));
  CHECK(code_of([&] { c.validate(49); }) == ErrorCode::InsufficientBudget);
  c.alpha_percent = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadConfig);
  c.alpha_percent = 100.0;
  CHECK_NOTHROW(c.validate());
  c.epsilon = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadConfig);
}

TEST_CASE("labeled pool stays a partition under random annotation") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> targets;
    const auto n = 5 + rng.index(60);
    for (std::size_t i = 0; i < n; ++i) targets.push_back(100 + 3 * i);
    LabeledPool pool(targets);
    std::size_t picked = 0;
    while (!pool.remaining().empty()) {
      auto rem = pool.remaining();
      rng.shuffle(rem.begin(), rem.end());
      rem.resize(std::min<std::size_t>(rem.size(), 1 + rng.index(5)));
      pool.annotate(rem);
      picked += rem.size();
      CHECK(pool.partitions(targets));
      CHECK(pool.selected().size() == picked);
      CHECK(std::is_sorted(pool.remaining().begin(), pool.remaining().end()));
    }
  }
}

TEST_CASE("labeled pool rejects repeats and foreign ids") {
  LabeledPool pool({4, 5, 6});
  const std::vector<std::size_t> twice{4, 4};
  CHECK(code_of([&] { pool.annotate(twice); }) == ErrorCode::BadId);
  const std::vector<std::size_t> foreign{9};
  CHECK(code_of([&] { pool.annotate(foreign); }) == ErrorCode::BadId);
  const std::vector<std::size_t> ok{6, 4};
  pool.annotate(ok);
  CHECK(pool.selected() == ok);
  CHECK(pool.remaining() == std::vector<std::size_t>{5});
  CHECK(code_of([&] { pool.annotate(ok); }) == ErrorCode::BadId);
  const std::vector<std::size_t> all{4, 5, 6};
  CHECK(pool.partitions(all));
  const std::vector<std::size_t> more{4, 5, 6, 7};
  CHECK_FALSE(pool.partitions(more));
}

TEST_CASE("seed mixing and rng determinism") {
  CHECK(mix_seed(1, {2, 3}) == mix_seed(1, {2, 3}));
  CHECK(mix_seed(1, {2, 3}) != mix_seed(1, {3, 2}));
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  double s = 0.0, ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    ss += x * x;
  }
  CHECK(std::abs(s / n) < 0.05);
  CHECK(std::abs(ss / n - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) {
    const auto k = r.index(7);
    CHECK(k < 7);
  }
}
