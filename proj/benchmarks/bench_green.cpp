#include <benchmark/benchmark.h>

#include "cayley/spectral.hpp"

using namespace cayley;

static void BM_GreenQuadrature(benchmark::State& state) {
  const int xi = static_cast<int>(state.range(0));
  const double t = static_cast<double>(state.range(1));
  const GreenEvaluator eval(SpectralParams::make(1.0, 1.0, xi));
  int a = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.green(a, 0, t));
    a = (a + 1) % 8;
  }
}
BENCHMARK(BM_GreenQuadrature)
    ->Args({2, 1})
    ->Args({3, 1})
    ->Args({3, 100})
    ->Args({26, 1});

static void BM_GreenChainClosedForm(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  int a = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_chain(1.0, 1.0, a, 0, t));
    a = (a + 1) % 8;
  }
}
BENCHMARK(BM_GreenChainClosedForm)->Arg(1)->Arg(10);

BENCHMARK_MAIN();
