#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "orlicz/orlicz.hpp"

using namespace orlicz;

static void BM_FenchelConjugate(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto f = tabulate([](double z) { return z * z; }, linear_spaced(2.0, 50.0, n));
  const auto p = linear_spaced(2.0, 96.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(fenchel_conjugate(f, p));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(BM_FenchelConjugate)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);

static void BM_MomentCurve(benchmark::State& state) {
  const auto s = generate(GaussianSpec{1.0}, std::size_t(state.range(0)), {1, 0});
  const auto p = log_spaced(2.0, 40.0, 32);
  for (auto _ : state) benchmark::DoNotOptimize(moment_curve(s, p));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_MomentCurve)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_HilbertTransform(benchmark::State& state) {
  const auto g = gm_signal(1.0, std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hilbert_transform(g));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_HilbertTransform)->RangeMultiplier(16)->Range(1 << 12, 1 << 20)->Unit(benchmark::kMillisecond);

static void BM_SampleWeibull(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_weibull_symmetric({2.0, {}}, n, {2, 0}));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(BM_SampleWeibull)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_SampleRademacherSeries(benchmark::State& state) {
  const RademacherSeriesSpec spec{0.75, {}, std::size_t(state.range(0))};
  constexpr std::size_t kN = 1 << 14;
  for (auto _ : state) benchmark::DoNotOptimize(sample_rademacher_series(spec, kN, {3, 0}));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(kN));
}
BENCHMARK(BM_SampleRademacherSeries)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SimulateSimple(benchmark::State& state) {
  MartingaleSpec spec;
  spec.kind = SimpleKind{0.75, {}};
  spec.n_max = std::size_t(state.range(0));
  const std::vector<std::size_t> t = {spec.n_max};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, 1000, {4, 0}, t));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * 1000 * state.range(0));
}
BENCHMARK(BM_SimulateSimple)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

static void BM_RFunction(benchmark::State& state) {
  const auto psi = PsiSpec::mr(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(r_function(1e-4, 16.0, psi));
}
BENCHMARK(BM_RFunction);
BENCHMARK_MAIN();
