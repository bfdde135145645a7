#include <benchmark/benchmark.h>

#include <random>

#include "infopatch/sampling.hpp"

namespace {

using namespace infopatch;

// Anchor grid of a 2040x1344 image at k=192, stride 2.
ImportanceMap random_map() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> dist(15.0f, 45.0f);
  const int rows = (1344 - 192) / 2 + 1;
  const int cols = (2040 - 192) / 2 + 1;
  std::vector<float> scores(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (auto& v : scores) v = dist(rng);
  return ImportanceMap(rows, cols, PatchGeometry(192, ScaleFactor(2), 2), MetricKind::PsnrBilinear, std::move(scores));
}

void BM_Sample(benchmark::State& state) {
  static const ImportanceMap map = random_map();
  SamplingConfig config;
  config.strategy = static_cast<Strategy>(state.range(0));
  config.size = SelectionSize::count(static_cast<std::size_t>(state.range(1)));
  config.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(sample(map, config));
  state.SetLabel(std::string(to_string(config.strategy)));
}
BENCHMARK(BM_Sample)
    ->ArgsProduct({{0, 1, 2}, {10, 1000, 10000}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
