#include <benchmark/benchmark.h>

#include <random>

#include "cayley/gillespie.hpp"
#include "cayley/rates.hpp"
#include "cayley/tree.hpp"

using namespace cayley;

namespace {

RateModel mixed_model(int xi) {
  RateModel m = diffusion_model(xi, 1.0);
  m.set_rate(1, 1, 0, 0, 0.5);
  m.set_rate(0, 0, 1, 1, 0.5);
  return m;
}

}  // namespace

static void BM_PropensityUpdate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  PropensityTable table(n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) table.set(i, u(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    table.set(i, u(rng));
    i = (i + 7919) % n;  // stride over the table
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PropensityUpdate)->RangeMultiplier(8)->Range(1 << 6, 1 << 18);

static void BM_PropensitySample(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  PropensityTable table(n);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) table.set(i, u(rng));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.sample(x));
    x += 0.618033988749895;
    if (x >= 1.0) x -= 1.0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PropensitySample)->RangeMultiplier(8)->Range(1 << 6, 1 << 18);

// Whole-trajectory throughput; the counter reports events per second.
static void BM_GillespieEvents(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const TruncatedTree tree = build_tree(3, depth);
  const RateModel model = mixed_model(3);
  const std::vector<double> t_samples{5.0};
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  for (auto _ : state) {
    const TrajectoryRecord run =
        gillespie_run(model, tree, InitSpec::bernoulli(0.5), derive_run_seed(42, seed++),
                      t_samples);
    events += run.events;
    benchmark::DoNotOptimize(run.occupancy.data());
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_GillespieEvents)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
