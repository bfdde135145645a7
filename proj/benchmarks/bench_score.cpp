#include <benchmark/benchmark.h>

#include <random>

#include "infopatch/importance.hpp"
#include "infopatch/resample.hpp"
#include "test_support.hpp"

namespace {

using namespace infopatch;

struct Pair {
  Raster hr;
  Raster lr;
};

Pair make_pair(int width, int height) {
  std::mt19937_64 rng(3);
  Raster hr = testing::textured_raster(rng, width, height, 3);
  Raster lr = bicubic_downscale(hr, ScaleFactor(2));
  return {std::move(hr), std::move(lr)};
}

// Fast path over image side; k fixed.
void BM_ScoreFast(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Pair p = make_pair(side, side);
  const PatchGeometry g(96, ScaleFactor(2));
  for (auto _ : state) benchmark::DoNotOptimize(score_map_fast(p.hr, p.lr, g));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ScoreFast)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

// Fast path over k; image fixed.
void BM_ScoreFastPatchSize(benchmark::State& state) {
  const Pair p = make_pair(1024, 1024);
  const PatchGeometry g(static_cast<int>(state.range(0)), ScaleFactor(2));
  for (auto _ : state) benchmark::DoNotOptimize(score_map_fast(p.hr, p.lr, g));
}
BENCHMARK(BM_ScoreFastPatchSize)->Arg(48)->Arg(96)->Arg(192)->Arg(384)->Unit(benchmark::kMillisecond);

void BM_ScoreNaive(benchmark::State& state) {
  const Pair p = make_pair(256, 256);
  const PatchGeometry g(static_cast<int>(state.range(0)), ScaleFactor(2));
  for (auto _ : state) benchmark::DoNotOptimize(score_map_naive(p.hr, p.lr, g));
}
BENCHMARK(BM_ScoreNaive)->Arg(48)->Arg(96)->Arg(192)->Unit(benchmark::kMillisecond);

void BM_ScoreAlternative(benchmark::State& state) {
  const Pair p = make_pair(1024, 1024);
  const auto metric = static_cast<MetricKind>(state.range(0));
  const PatchGeometry g(96, ScaleFactor(2));
  for (auto _ : state) benchmark::DoNotOptimize(score_map_alternative(p.hr, metric, g));
  state.SetLabel(std::string(to_string(metric)));
}
BENCHMARK(BM_ScoreAlternative)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

void BM_BicubicDownscale(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const ScaleFactor s(static_cast<int>(state.range(0)));
  const Raster hr = crop_to_multiple(testing::random_raster(rng, 1024, 1024, 3), s);
  for (auto _ : state) benchmark::DoNotOptimize(bicubic_downscale(hr, s));
}
BENCHMARK(BM_BicubicDownscale)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace
