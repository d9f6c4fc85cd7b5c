#include <benchmark/benchmark.h>

#include <numeric>

#include "gala/kernels.hpp"
#include "gala/rng.hpp"
#include "gala/trainer.hpp"

using namespace gala;
using namespace gala::kernels;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

void BM_forward_rows(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto exec = st.range(1) ? Exec::parallel : Exec::serial;
  const auto x = random_matrix(n, 16, 1);
  const auto model = init_model(16, 32, 5, 2);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  Matrix feat(n, 32), probs(n, 5);
  for (auto _ : st) {
    forward_rows(model, x, rows, feat, probs, exec);
    benchmark::DoNotOptimize(probs.data().data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_nearest_centroid(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto exec = st.range(1) ? Exec::parallel : Exec::serial;
  const auto pts = random_matrix(n, 32, 3);
  const auto cents = random_matrix(16, 32, 4);
  std::vector<int> assign(n);
  std::vector<double> dist(n);
  for (auto _ : st) {
    nearest_centroid(pts, cents, assign, dist, exec);
    benchmark::DoNotOptimize(assign.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_row_moments(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto exec = st.range(1) ? Exec::parallel : Exec::serial;
  const auto v = random_matrix(n, 64, 5);
  std::vector<double> mean(n), sd(n);
  for (auto _ : st) {
    row_moments(v, mean, sd, exec);
    benchmark::DoNotOptimize(sd.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

}  // namespace

BENCHMARK(BM_forward_rows)->ArgsProduct({{2000, 8000}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_nearest_centroid)->ArgsProduct({{2000, 8000}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_row_moments)->ArgsProduct({{2000, 8000}, {0, 1}})->ArgNames({"n", "omp"});

BENCHMARK_MAIN();
