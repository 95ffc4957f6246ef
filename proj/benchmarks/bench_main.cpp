#include <benchmark/benchmark.h>

#include <random>

#include "auxtest/bench.hpp"
#include "auxtest/chisq.hpp"
#include "auxtest/matrix.hpp"
#include "auxtest/raking.hpp"

using namespace auxtest;

namespace {

SymMatrix random_cov(int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(dim, dim - 1);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim - 1; ++j) a(i, j) = z(gen);
  }
  return SymMatrix(a * a.transpose());
}

void BM_PseudoInverse(benchmark::State& state) {
  const SymMatrix m = random_cov(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_inverse(m));
}
BENCHMARK(BM_PseudoInverse)->Arg(2)->Arg(4)->Arg(8);

void BM_PsdSqrtProduct(benchmark::State& state) {
  const PartitionSpec spec({0.2, 0.3, 0.5});
  const SymMatrix s1 = build_sigma0_sigma1(std::vector<double>{0.25, 0.25, 0.5}, spec).sigma1;
  const SymMatrix sh = 0.5 * s1;
  for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt_product(pseudo_inverse(sh), s1));
}
BENCHMARK(BM_PsdSqrtProduct);

void BM_Rake(benchmark::State& state) {
  const BenchConfig c = preset(TestKind::kZAuxRaking);
  const WeightedSample s =
      WeightedSample::uniform(draw_sample(c.distribution, static_cast<std::size_t>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(rake(s, c.schedule, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rake)->Arg(100)->Arg(1000)->Arg(10000);

void BM_EstimatePower(benchmark::State& state) {
  BenchConfig c = preset(static_cast<TestKind>(state.range(0)));
  c.reps = 200;
  c.n = {200};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_power(c));
}
BENCHMARK(BM_EstimatePower)
    ->Arg(static_cast<int>(TestKind::kZAuxRaking))
    ->Arg(static_cast<int>(TestKind::kZAuxCondmean))
    ->Arg(static_cast<int>(TestKind::kChisqAuxRaking))
    ->Arg(static_cast<int>(TestKind::kChisqAuxCondmean))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
