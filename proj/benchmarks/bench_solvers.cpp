#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "mfg/hjb.hpp"
#include "mfg/kfp.hpp"

namespace {

using namespace mfg;

void BM_HjbMarch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = fixtures::unit_grid(n);
  const TimeGrid t(0.5, n);
  const Field terminal = Field::from_function(g, [](const Vec2& x) { return 0.3 * std::cos(fixtures::pi * x[0]); });
  const std::vector<Field> forcing(t.points(), Field(g, 0.1));
  const auto h = fixtures::quadratic();
  for (auto _ : state) benchmark::DoNotOptimize(march_hjb(g, t, 0.1, *h, forcing, terminal));
}
BENCHMARK(BM_HjbMarch)->RangeMultiplier(2)->Range(50, 400)->Unit(benchmark::kMillisecond);

void BM_KfpMarch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = fixtures::unit_grid(n);
  const TimeGrid t(1.0, n);
  const DriftTrajectory drift(t.points(), VectorField(g, {-1.0, 0.0}));
  const Field m0 = fixtures::uniform_density(g);
  for (auto _ : state) benchmark::DoNotOptimize(march_kfp(g, t, 0.1, drift, m0));
}
BENCHMARK(BM_KfpMarch)->RangeMultiplier(2)->Range(50, 400)->Unit(benchmark::kMillisecond);

void BM_KfpMarch2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g({0.0, 1.0}, n, {0.0, 1.0}, n);
  const TimeGrid t(0.5, 20);
  const DriftTrajectory drift(t.points(), VectorField(g, {-1.0, 0.5}));
  const Field m0 = fixtures::uniform_density(g);
  for (auto _ : state) benchmark::DoNotOptimize(march_kfp(g, t, 0.1, drift, m0));
}
BENCHMARK(BM_KfpMarch2D)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PicardSchelling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = fixtures::schelling_problem(0.05, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(p, PicardOptions{}));
}
BENCHMARK(BM_PicardSchelling)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
