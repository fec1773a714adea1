#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "ucompare/designs.hpp"
#include "ucompare/estimators.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/learners.hpp"
#include "ucompare/numeric.hpp"
#include "ucompare/random.hpp"

using namespace ucompare;

namespace {

Dataset synthetic(std::size_t n, std::size_t dim, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> x(n * dim);
  std::vector<Label> y(n);
  for (auto& v : x) v = rng.uniform01();
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<Label>(x[i * dim] + 0.3 * rng.uniform01() > 0.6);
  return Dataset(std::move(x), std::move(y), dim);
}

ComparisonKernel knn_vs_stump(std::size_t g) {
  return ComparisonKernel(knn_learner(3), decision_stump_learner(), Loss::misclassification(), g);
}

void BM_CompleteKernelTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dataset data = synthetic(n, 2, 1);
  const auto kernel = knn_vs_stump(2);
  for (auto _ : state) {
    CompleteKernelTable table(kernel, data);
    benchmark::DoNotOptimize(table.kappa(1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(binomial_saturating(n, 3)));
}
BENCHMARK(BM_CompleteKernelTable)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_IncompleteDelta(benchmark::State& state) {
  const Dataset data = synthetic(62, 5, 2);
  const auto kernel = knn_vs_stump(26);
  EstimatorConfig config;
  config.g = 26;
  config.n_delta = static_cast<std::uint64_t>(state.range(0));
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_delta(kernel, data, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IncompleteDelta)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_IncompleteKappa(benchmark::State& state) {
  const Dataset data = synthetic(62, 5, 3);
  const auto kernel = knn_vs_stump(26);
  EstimatorConfig config;
  config.g = 26;
  config.n_kappa = static_cast<std::uint64_t>(state.range(0));
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_kappa_c(kernel, data, 1, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IncompleteKappa)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KnnFitPredict(benchmark::State& state) {
  const auto g = static_cast<std::size_t>(state.range(0));
  const Dataset data = synthetic(g + 1, 5, 4);
  const auto learner = knn_learner(3);
  std::vector<std::size_t> rows(g);
  std::iota(rows.begin(), rows.end(), 0);
  for (auto _ : state) {
    const auto predictor = learner->fit(data, rows);
    benchmark::DoNotOptimize(predictor->predict(data.features(g)));
  }
}
BENCHMARK(BM_KnnFitPredict)->Arg(2)->Arg(26)->Arg(200);

void BM_HypergeometricWeights(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hypergeometric_weights(n, n / 2));
}
BENCHMARK(BM_HypergeometricWeights)->Arg(62)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
