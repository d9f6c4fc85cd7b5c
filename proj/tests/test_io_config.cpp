#include <doctest.h>

#include <filesystem>

#include "gala/config.hpp"
#include "gala/io.hpp"
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

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("feature CSV round-trips bit-exactly") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    auto ds = testutil::random_dataset(rng, 1 + static_cast<int>(rng.index(3)), 1 + static_cast<int>(rng.index(8)),
                                       1 + static_cast<int>(rng.index(8)), 1 + rng.index(5), 3);
    for (double& v : ds.features.data()) v = std::ldexp(rng.normal(), static_cast<int>(rng.index(40)) - 20);
    for (auto& id : ds.ids) id = id * 7 - 3;
    const auto back = dataset_from_csv(dataset_to_csv(ds), ds.n_source_domains, ds.n_classes);
    CHECK(back == ds);
  }
}

TEST_CASE("domain and class counts are inferred") {
  const std::string text = "id,domain,label,f0\n1,0,0,0.5\n2,1,2,1.5\n3,2,-1,2.5\n";
  const auto ds = dataset_from_csv(text);
  CHECK(ds.n_source_domains == 2);
  CHECK(ds.n_classes == 3);
  CHECK(ds.ids == std::vector<std::int64_t>{1, 2, 3});
}

TEST_CASE("malformed feature files are schema errors") {
  CHECK(code_of([] { dataset_from_csv(""); }) == ErrorCode::Schema);
  CHECK(code_of([] { dataset_from_csv("id,label,domain,f0\n"); }) == ErrorCode::Schema);
  CHECK(code_of([] { dataset_from_csv("id,domain,label,f0\n1,0,0\n"); }) == ErrorCode::Schema);
  CHECK(code_of([] { dataset_from_csv("id,domain,label,f0\n1,0,0,abc\n"); }) == ErrorCode::Schema);
  CHECK(code_of([] { read_dataset_csv("/nonexistent/features.csv"); }) == ErrorCode::Io);
}

TEST_CASE("answer key and probability files") {
  const auto ds = dataset_from_csv("id,domain,label,f0\n7,0,1,0\n8,1,-1,1\n9,1,-1,2\n", 1, 2);
  const auto key = answer_key_from_csv("id,label\n9,0\n8,1\n", ds);
  CHECK(key.rows == std::vector<std::size_t>{1, 2});
  CHECK(key.labels == std::vector<int>{1, 0});
  CHECK(answer_key_from_csv(answer_key_to_csv(ds, key), ds) == key);
  CHECK(code_of([&] { answer_key_from_csv("id,label\n5,0\n", ds); }) == ErrorCode::Schema);
  CHECK(code_of([&] { answer_key_from_csv("id,label\n8,4\n", ds); }) == ErrorCode::Schema);

  const auto p = probabilities_from_csv("id,p0,p1\n8,0.25,0.75\n", ds);
  CHECK(p(1, 1) == 0.75);
  CHECK(std::isnan(p(0, 0)));
  CHECK(code_of([&] { probabilities_from_csv("id,p0,p1\n8,0.3,0.3\n", ds); }) == ErrorCode::Schema);
  CHECK(code_of([&] { probabilities_from_csv("id,p0,p1\n4,0.5,0.5\n", ds); }) == ErrorCode::Schema);
}

TEST_CASE("atomic writes leave no temp file") {
  const auto dir = std::filesystem::temp_directory_path() / "gala_io_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.txt", "hello");
  CHECK(read_file(dir / "a.txt") == "hello");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing and unknown keys") {
  const auto e = parse_config("# comment\nbudget = 3\n\n  alpha=40  # trailing\n");
  CHECK(e.at("budget") == "3");
  CHECK(e.at("alpha") == "40");
  CHECK(code_of([] { parse_config("bugdet = 3\n"); }) == ErrorCode::BadConfig);
  CHECK(message_of([] { parse_config("bugdet = 3\n"); }).find("bugdet") != std::string::npos);
  CHECK(code_of([] { parse_config("budget 3\n"); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { build_spec({{"budget", "x"}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { build_spec({{"distance", "cosine"}}); }) == ErrorCode::BadConfig);
}

TEST_CASE("defaults text covers every key and builds the default spec") {
  const auto e = parse_config(default_config_text());
  CHECK(e.size() == config_keys().size());
  const auto spec = build_spec(e);
  const ExperimentSpec def;
  CHECK(spec.selection.budget_per_round == def.selection.budget_per_round);
  CHECK(spec.selection.alpha_percent == def.selection.alpha_percent);
  CHECK(spec.selection.epsilon == def.selection.epsilon);
  CHECK(spec.training.active_epochs == def.training.active_epochs);
  CHECK(spec.training.learning_rate == def.training.learning_rate);
  CHECK(spec.training.hidden_dim == def.training.hidden_dim);
  CHECK(spec.data.scenario.samples_per_domain == def.data.scenario.samples_per_domain);
  CHECK(spec.data.scenario.domain_shift.rotation == def.data.scenario.domain_shift.rotation);
  CHECK(spec.strategies == def.strategies);
  CHECK(spec.seeds == def.seeds);
}

TEST_CASE("later entries override earlier ones") {
  const auto file = parse_config("budget = 3\nrounds = 4\nseeds = 0..2\n");
  const auto merged = merge_config(file, {{"budget", "7"}});
  const auto spec = build_spec(merged);
  CHECK(spec.selection.budget_per_round == 7);
  CHECK(spec.selection.rounds == 4);
  CHECK(spec.training.active_epochs == TrainConfig::even_schedule(20, 4));
  CHECK(spec.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(code_of([&] { merge_config(file, {{"nope", "1"}}); }) == ErrorCode::BadConfig);
}

TEST_CASE("explicit schedule must match the round count") {
  CHECK(code_of([] { build_spec({{"active_epochs", "10,12"}}); }) == ErrorCode::BadConfig);
  const auto s = build_spec({{"active_epochs", "5,6"}, {"rounds", "2"}});
  CHECK(s.training.active_epochs == std::vector<int>{5, 6});
}
