#include <benchmark/benchmark.h>

#include <random>

#include "infopatch/integral.hpp"

namespace {

using namespace infopatch;

std::vector<std::int64_t> random_plane(int side) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> dist(0, 3 * 255 * 255);
  std::vector<std::int64_t> plane(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (auto& v : plane) v = dist(rng);
  return plane;
}

template <typename Table>
void BM_BuildIntegral(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto plane = random_plane(side);
  for (auto _ : state) {
    Table table(std::span<const std::int64_t>(plane), side, side);
    benchmark::DoNotOptimize(table.total());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plane.size()));
}
BENCHMARK(BM_BuildIntegral<IntegralImage>)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildIntegral<WideIntegralImage>)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

void BM_WindowSum(benchmark::State& state) {
  const auto plane = random_plane(1024);
  const WideIntegralImage table(std::span<const std::int64_t>(plane), 1024, 1024);
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> pos(0, 1024 - 192);
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.rect_sum_unchecked(pos(rng), pos(rng), 192, 192));
  }
}
BENCHMARK(BM_WindowSum);

}  // namespace
