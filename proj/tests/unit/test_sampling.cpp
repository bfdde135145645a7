#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "infopatch/error.hpp"
#include "infopatch/rng.hpp"
#include "infopatch/sampling.hpp"

namespace infopatch {
namespace {

ImportanceMap random_map(std::mt19937_64& rng, int rows, int cols, int k, int s, int stride,
                         MetricKind metric = MetricKind::PsnrBilinear) {
  std::uniform_real_distribution<float> dist(10.0f, 50.0f);
  std::vector<float> scores(static_cast<std::size_t>(rows * cols));
  for (auto& v : scores) v = dist(rng);
  return ImportanceMap(rows, cols, PatchGeometry(k, ScaleFactor(s), stride), metric, std::move(scores));
}

SamplingConfig config_for(Strategy strategy, SelectionSize size, std::uint64_t seed = 0) {
  SamplingConfig c;
  c.strategy = strategy;
  c.size = size;
  c.seed = seed;
  return c;
}

TEST(ResolveCount, Cases) {
  EXPECT_EQ(resolve_count(1.0, 1000), 1000u);
  EXPECT_EQ(resolve_count(0.1, 1000), 100u);
  EXPECT_EQ(resolve_count(0.3, 1000), 300u);
  EXPECT_EQ(resolve_count(1e-6, 600000), 1u);
  EXPECT_EQ(resolve_count(0.5, 3), 1u);
  EXPECT_THROW(resolve_count(0.0, 10), Error);
  EXPECT_THROW(resolve_count(1.5, 10), Error);
  EXPECT_THROW(resolve_count(0.5, 0), Error);
}

TEST(SelectionSize, CountIsClampedToAnchors) {
  EXPECT_EQ(SelectionSize::count(50).resolve(20), 20u);
  EXPECT_EQ(SelectionSize::count(5).resolve(20), 5u);
  EXPECT_THROW(SelectionSize::count(0), Error);
  EXPECT_THROW(SelectionSize::portion(-0.1), Error);
}

TEST(Iou, Cases) {
  const PatchCandidate a{0, 0, 0.0f};
  EXPECT_DOUBLE_EQ(iou(a, a, 192), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, {0, 192, 0.0f}, 192), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, {500, 500, 0.0f}, 192), 0.0);
  // (96 * 192) / (2 * 192^2 - 96 * 192) = 1/3
  EXPECT_DOUBLE_EQ(iou(a, {0, 96, 0.0f}, 192), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou({0, 96, 0.0f}, a, 192), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(a, {1, 1, 0.0f}, 2), 1.0 / 7.0);
}

TEST(MoreInformative, PolarityAndTies) {
  const PatchCandidate low{4, 4, 10.0f};
  const PatchCandidate high{0, 0, 20.0f};
  EXPECT_TRUE(more_informative(low, high, MetricKind::PsnrBilinear));
  EXPECT_TRUE(more_informative(high, low, MetricKind::Std0));
  const PatchCandidate inf{0, 0, kPerfectScore};
  EXPECT_TRUE(more_informative(high, inf, MetricKind::PsnrBilinear));
  EXPECT_TRUE(more_informative({0, 2, 5.0f}, {0, 4, 5.0f}, MetricKind::PsnrBilinear));
  EXPECT_TRUE(more_informative({0, 4, 5.0f}, {2, 0, 5.0f}, MetricKind::PsnrBilinear));
}

TEST(Greedy, FullPortionIsFullySorted) {
  std::mt19937_64 rng(1);
  const ImportanceMap map = random_map(rng, 6, 7, 4, 2, 2);
  const Selection sel = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::portion(1.0)));
  ASSERT_EQ(sel.entries.size(), map.size());
  for (std::size_t i = 1; i < sel.entries.size(); ++i) {
    ASSERT_LE(sel.entries[i - 1].score, sel.entries[i].score);
  }
}

TEST(Greedy, PicksExtremeScores) {
  std::mt19937_64 rng(2);
  const ImportanceMap map = random_map(rng, 9, 11, 4, 2, 2);
  std::vector<float> sorted(map.scores().begin(), map.scores().end());
  std::sort(sorted.begin(), sorted.end());
  const Selection sel = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::count(3)));
  ASSERT_EQ(sel.entries.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(sel.entries[static_cast<std::size_t>(i)].score, sorted[static_cast<std::size_t>(i)]);

  const ImportanceMap std_map(map.rows(), map.cols(), map.geometry(), MetricKind::Std1,
                              std::vector<float>(map.scores().begin(), map.scores().end()));
  const Selection hi = sample_greedy(std_map, config_for(Strategy::Greedy, SelectionSize::count(3)));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(hi.entries[static_cast<std::size_t>(i)].score, sorted[sorted.size() - 1 - static_cast<std::size_t>(i)]);
}

TEST(Greedy, TiesBreakLexicographically) {
  const ImportanceMap map(3, 3, PatchGeometry(4, ScaleFactor(2)), MetricKind::PsnrBilinear, std::vector<float>(9, 30.0f));
  const Selection sel = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::count(2)));
  ASSERT_EQ(sel.entries.size(), 2u);
  EXPECT_EQ(sel.entries[0], (PatchCandidate{0, 0, 30.0f}));
  EXPECT_EQ(sel.entries[1], (PatchCandidate{0, 2, 30.0f}));
}

TEST(Greedy, PerfectScoresComeLast) {
  std::vector<float> scores = {kPerfectScore, 40.0f, kPerfectScore, 45.0f};
  const ImportanceMap map(2, 2, PatchGeometry(4, ScaleFactor(2)), MetricKind::PsnrBilinear, scores);
  const Selection sel = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::portion(1.0)));
  EXPECT_EQ(sel.entries[0].score, 40.0f);
  EXPECT_EQ(sel.entries[1].score, 45.0f);
  EXPECT_EQ(sel.entries[2], (PatchCandidate{0, 0, kPerfectScore}));
  EXPECT_EQ(sel.entries[3], (PatchCandidate{2, 0, kPerfectScore}));
}

TEST(Greedy, GrowingPortionNeverDropsAnchors) {
  std::mt19937_64 rng(3);
  const ImportanceMap map = random_map(rng, 20, 20, 8, 2, 2);
  std::set<std::pair<int, int>> previous;
  for (double p = 0.01; p <= 1.0; p += 0.07) {
    const Selection sel = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::portion(p)));
    std::set<std::pair<int, int>> current;
    for (const auto& e : sel.entries) current.insert({e.u, e.v});
    for (const auto& a : previous) ASSERT_TRUE(current.contains(a)) << "p=" << p;
    previous = std::move(current);
  }
}

TEST(Nms, SuppressesHalfOverlap) {
  const ImportanceMap map(1, 2, PatchGeometry(192, ScaleFactor(2), 96), MetricKind::PsnrBilinear, {20.0f, 10.0f});
  const Selection sel = sample_nms(map, config_for(Strategy::Nms, SelectionSize::count(2)));
  ASSERT_EQ(sel.requested, 2u);
  ASSERT_EQ(sel.entries.size(), 1u);
  EXPECT_EQ(sel.entries[0], (PatchCandidate{0, 96, 10.0f}));

  SamplingConfig loose = config_for(Strategy::Nms, SelectionSize::count(2));
  loose.nms_iou_threshold = 0.5;
  EXPECT_EQ(sample_nms(map, loose).entries.size(), 2u);
}

TEST(Nms, NearOneThresholdDegeneratesToGreedy) {
  std::mt19937_64 rng(4);
  const ImportanceMap map = random_map(rng, 12, 12, 8, 2, 2);
  SamplingConfig nms = config_for(Strategy::Nms, SelectionSize::portion(0.3));
  nms.nms_iou_threshold = 1.0 - 1e-9;
  const Selection a = sample_nms(map, nms);
  const Selection b = sample_greedy(map, config_for(Strategy::Greedy, SelectionSize::portion(0.3)));
  EXPECT_EQ(a.entries, b.entries);
}

TEST(Nms, DisjointGridAcceptsEverything) {
  std::mt19937_64 rng(5);
  const ImportanceMap map = random_map(rng, 5, 6, 8, 2, 8);
  const Selection sel = sample_nms(map, config_for(Strategy::Nms, SelectionSize::portion(1.0)));
  EXPECT_EQ(sel.entries.size(), map.size());
}

TEST(Nms, RejectsOutOfRangeThreshold) {
  std::mt19937_64 rng(6);
  const ImportanceMap map = random_map(rng, 3, 3, 4, 2, 2);
  SamplingConfig c = config_for(Strategy::Nms, SelectionSize::count(2));
  c.nms_iou_threshold = 1.0;
  EXPECT_THROW(sample_nms(map, c), Error);
}

TEST(Nms, AcceptedPairsRespectThresholdAndRejectionsAreJustified) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ImportanceMap map = random_map(rng, 15, 17, 8, 2, 2);
    SamplingConfig c = config_for(Strategy::Nms, SelectionSize::portion(0.2));
    c.nms_iou_threshold = 0.1 * (trial % 5);
    const Selection sel = sample_nms(map, c);
    const int k = map.geometry().patch_size();
    for (std::size_t i = 0; i < sel.entries.size(); ++i)
      for (std::size_t j = i + 1; j < sel.entries.size(); ++j)
        ASSERT_LE(iou(sel.entries[i], sel.entries[j], k), c.nms_iou_threshold);
    // Every skipped candidate ranked before the last accepted one overlaps an
    // accepted patch above the threshold.
    const auto ranked = ranked_candidates(map);
    std::size_t next = 0;
    for (const auto& cand : ranked) {
      if (next == sel.entries.size()) break;
      if (cand == sel.entries[next]) {
        ++next;
        continue;
      }
      bool blocked = false;
      for (std::size_t i = 0; i < next; ++i) blocked |= iou(cand, sel.entries[i], k) > c.nms_iou_threshold;
      ASSERT_TRUE(blocked);
    }
  }
}

TEST(Dart, SameSeedSameSelection) {
  std::mt19937_64 rng(8);
  const ImportanceMap map = random_map(rng, 30, 30, 16, 2, 2);
  const SamplingConfig c = config_for(Strategy::Dart, SelectionSize::count(6), 1234);
  EXPECT_EQ(sample_dart(map, c).entries, sample_dart(map, c).entries);
}

TEST(Dart, AcceptedDartsAreDisjoint) {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImportanceMap map = random_map(rng, 25, 30, 12, 3, 3);
    const Selection sel = sample_dart(map, config_for(Strategy::Dart, SelectionSize::portion(1.0), seed));
    ASSERT_FALSE(sel.entries.empty());
    for (std::size_t i = 0; i < sel.entries.size(); ++i) {
      for (std::size_t j = i + 1; j < sel.entries.size(); ++j) {
        ASSERT_EQ(iou(sel.entries[i], sel.entries[j], 12), 0.0);
      }
      if (i > 0) ASSERT_FALSE(more_informative(sel.entries[i], sel.entries[i - 1], map.metric()));
    }
  }
}

TEST(Dart, SingleAnchorGrid) {
  const ImportanceMap map(1, 1, PatchGeometry(8, ScaleFactor(2)), MetricKind::PsnrBilinear, {17.0f});
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const Selection sel = sample_dart(map, config_for(Strategy::Dart, SelectionSize::portion(1.0), seed));
    ASSERT_EQ(sel.entries.size(), 1u);
    EXPECT_EQ(sel.entries[0], (PatchCandidate{0, 0, 17.0f}));
  }
}

TEST(Dart, KeepsMostInformativeDarts) {
  std::mt19937_64 rng(10);
  const ImportanceMap map = random_map(rng, 40, 40, 8, 2, 2);
  SamplingConfig all = config_for(Strategy::Dart, SelectionSize::portion(1.0), 77);
  all.dart_max_attempts = 50;
  SamplingConfig few = all;
  few.size = SelectionSize::count(3);
  const Selection every = sample_dart(map, all);
  const Selection top = sample_dart(map, few);
  ASSERT_EQ(top.entries.size(), 3u);
  // Same darts are thrown; pruning keeps the best three of them.
  for (int i = 0; i < 3; ++i) EXPECT_EQ(top.entries[static_cast<std::size_t>(i)], every.entries[static_cast<std::size_t>(i)]);
}

TEST(Sampling, EmptyAndDispatch) {
  std::mt19937_64 rng(11);
  const ImportanceMap map = random_map(rng, 4, 4, 4, 2, 2);
  for (const Strategy s : {Strategy::Greedy, Strategy::Nms, Strategy::Dart}) {
    const Selection sel = sample(map, config_for(s, SelectionSize::count(2), 5));
    EXPECT_LE(sel.entries.size(), 2u);
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("random"), Error);
}

TEST(XorShift64Star, ReferenceSequence) {
  // splitmix64(0) = 0xE220A8397B1DCDAF; then one xorshift64* step.
  EXPECT_EQ(XorShift64Star::splitmix64(0), 0xE220A8397B1DCDAFull);
  std::uint64_t x = 0xE220A8397B1DCDAFull;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  XorShift64Star rng(0);
  EXPECT_EQ(rng.next(), x * 0x2545F4914F6CDD1Dull);
  XorShift64Star bounded(42);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(bounded.below(7), 7u);
}

}  // namespace
}  // namespace infopatch
