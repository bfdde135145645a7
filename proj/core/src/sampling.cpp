#include "infopatch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "infopatch/error.hpp"
#include "infopatch/rng.hpp"

namespace infopatch {

namespace {

// Accepted patches bucketed by (u / k, v / k). Two k x k squares can only
// overlap when their buckets are adjacent, so each query touches 9 buckets.
class OverlapGrid {
public:
  explicit OverlapGrid(int k) : k_(k) {}

  void insert(const PatchCandidate& p) { buckets_[key(p.u / k_, p.v / k_)].push_back(p); }

  // Largest IoU between `p` and any inserted patch.
  double max_iou(const PatchCandidate& p) const {
    double best = 0.0;
    const int bu = p.u / k_;
    const int bv = p.v / k_;
    for (int du = -1; du <= 1; ++du) {
      for (int dv = -1; dv <= 1; ++dv) {
        const auto it = buckets_.find(key(bu + du, bv + dv));
        if (it == buckets_.end()) continue;
        for (const PatchCandidate& q : it->second) best = std::max(best, iou(p, q, k_));
      }
    }
    return best;
  }

private:
  static std::uint64_t key(int bu, int bv) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(bu)) << 32) |
           static_cast<std::uint32_t>(bv);
  }

  int k_;
  std::unordered_map<std::uint64_t, std::vector<PatchCandidate>> buckets_;
};

// Anchors still available to a dart: one flag per grid cell. Accepting a dart
// blocks every anchor whose patch would overlap it.
class DartMask {
public:
  explicit DartMask(const ImportanceMap& map)
      : rows_(map.rows()),
        cols_(map.cols()),
        reach_((map.geometry().patch_size() - 1) / map.geometry().stride()),
        blocked_(map.size(), 0),
        open_(map.size()) {}

  bool blocked(std::size_t index) const noexcept { return blocked_[index] != 0; }
  bool saturated() const noexcept { return open_ == 0; }

  void accept(std::size_t index) {
    const int r = static_cast<int>(index / static_cast<std::size_t>(cols_));
    const int c = static_cast<int>(index % static_cast<std::size_t>(cols_));
    const int c0 = std::max(0, c - reach_);
    const int c1 = std::min(cols_ - 1, c + reach_);
    for (int rr = std::max(0, r - reach_); rr <= std::min(rows_ - 1, r + reach_); ++rr) {
      std::uint8_t* row = blocked_.data() + static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols_);
      std::size_t newly = 0;
      for (int cc = c0; cc <= c1; ++cc) {
        newly += row[cc] == 0 ? 1 : 0;
        row[cc] = 1;
      }
      open_ -= newly;
    }
  }

private:
  int rows_;
  int cols_;
  int reach_;
  std::vector<std::uint8_t> blocked_;
  std::size_t open_;
};

void check_map(const ImportanceMap& map) {
  if (map.size() == 0) throw_data_error("sampling: empty anchor grid");
}

std::size_t requested_count(const ImportanceMap& map, const SamplingConfig& config) {
  return config.size.resolve(map.size());
}

PatchCandidate candidate_at(const ImportanceMap& map, std::size_t index) {
  const int cols = map.cols();
  const int r = static_cast<int>(index / static_cast<std::size_t>(cols));
  const int c = static_cast<int>(index % static_cast<std::size_t>(cols));
  return {map.anchor_u(r), map.anchor_v(c), map.score(r, c)};
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Greedy: return "greedy";
    case Strategy::Nms: return "nms";
    case Strategy::Dart: return "dart";
  }
  return "greedy";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "greedy") return Strategy::Greedy;
  if (name == "nms") return Strategy::Nms;
  if (name == "dart") return Strategy::Dart;
  throw_data_error("unknown strategy '" + std::string(name) + "' (expected greedy, nms, dart)");
}

SelectionSize SelectionSize::portion(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw_data_error("portion must lie in (0, 1], got " + std::to_string(p));
  }
  SelectionSize s;
  s.portion_ = p;
  return s;
}

SelectionSize SelectionSize::count(std::size_t n) {
  if (n < 1) throw_data_error("count must be at least 1");
  SelectionSize s;
  s.count_ = n;
  return s;
}

std::size_t SelectionSize::resolve(std::size_t total_anchors) const {
  if (portion_) return resolve_count(*portion_, total_anchors);
  if (total_anchors < 1) throw_data_error("no anchors to select from");
  return std::min(*count_, total_anchors);
}

std::size_t resolve_count(double portion, std::size_t total_anchors) {
  if (!(portion > 0.0 && portion <= 1.0)) {
    throw_data_error("portion must lie in (0, 1], got " + std::to_string(portion));
  }
  if (total_anchors < 1) throw_data_error("no anchors to select from");
  const double exact = portion * static_cast<double>(total_anchors);
  // p * N that is an integer up to representation error (0.3 * 1000) counts as
  // that integer rather than one less.
  double floored = std::floor(exact);
  const double nearest = std::round(exact);
  if (nearest > floored && nearest - exact <= 1e-9 * exact) floored = nearest;
  const auto n = static_cast<std::size_t>(floored);
  return std::clamp<std::size_t>(n, 1, total_anchors);
}

double iou(const PatchCandidate& a, const PatchCandidate& b, int k) noexcept {
  const long long overlap_u = std::max(0, k - std::abs(a.u - b.u));
  const long long overlap_v = std::max(0, k - std::abs(a.v - b.v));
  const long long inter = overlap_u * overlap_v;
  if (inter == 0) return 0.0;
  const long long area = static_cast<long long>(k) * k;
  return static_cast<double>(inter) / static_cast<double>(2 * area - inter);
}

bool more_informative(const PatchCandidate& a, const PatchCandidate& b, MetricKind metric) noexcept {
  if (a.score != b.score) {
    return higher_is_more_informative(metric) ? a.score > b.score : a.score < b.score;
  }
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

std::vector<PatchCandidate> ranked_candidates(const ImportanceMap& map) {
  std::vector<PatchCandidate> all(map.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = candidate_at(map, i);
  const MetricKind metric = map.metric();
  std::sort(all.begin(), all.end(),
            [metric](const PatchCandidate& a, const PatchCandidate& b) { return more_informative(a, b, metric); });
  return all;
}

Selection sample_greedy(const ImportanceMap& map, const SamplingConfig& config) {
  check_map(map);
  const std::size_t n = requested_count(map, config);
  std::vector<PatchCandidate> all(map.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = candidate_at(map, i);
  const MetricKind metric = map.metric();
  const auto cmp = [metric](const PatchCandidate& a, const PatchCandidate& b) {
    return more_informative(a, b, metric);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), cmp);
  all.resize(n);
  return {n, std::move(all)};
}

Selection sample_nms(const ImportanceMap& map, const SamplingConfig& config) {
  check_map(map);
  const double threshold = config.nms_iou_threshold;
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw_data_error("nms iou threshold must lie in [0, 1), got " + std::to_string(threshold));
  }
  const std::size_t n = requested_count(map, config);
  const int k = map.geometry().patch_size();
  Selection out{n, {}};
  OverlapGrid accepted(k);
  for (const PatchCandidate& cand : ranked_candidates(map)) {
    if (accepted.max_iou(cand) > threshold) continue;
    accepted.insert(cand);
    out.entries.push_back(cand);
    if (out.entries.size() == n) break;
  }
  return out;
}

Selection sample_dart(const ImportanceMap& map, const SamplingConfig& config) {
  check_map(map);
  const std::size_t n = requested_count(map, config);
  const std::size_t budget = config.dart_max_attempts > 0 ? config.dart_max_attempts : 10 * n;

  // Phase 1: uniform darts over the anchor grid, keeping only those disjoint
  // from every earlier dart. Stops after `budget` consecutive misses or once
  // no anchor is left open.
  XorShift64Star rng(config.seed);
  DartMask mask(map);
  std::vector<PatchCandidate> darts;
  std::size_t rejections = 0;
  while (rejections < budget && !mask.saturated()) {
    const auto index = static_cast<std::size_t>(rng.below(map.size()));
    if (mask.blocked(index)) {
      ++rejections;
      continue;
    }
    rejections = 0;
    mask.accept(index);
    darts.push_back(candidate_at(map, index));
  }

  // Phase 2: prune to the most informative darts.
  const MetricKind metric = map.metric();
  std::sort(darts.begin(), darts.end(),
            [metric](const PatchCandidate& a, const PatchCandidate& b) { return more_informative(a, b, metric); });
  if (darts.size() > n) darts.resize(n);
  return {n, std::move(darts)};
}

Selection sample(const ImportanceMap& map, const SamplingConfig& config) {
  switch (config.strategy) {
    case Strategy::Greedy: return sample_greedy(map, config);
    case Strategy::Nms: return sample_nms(map, config);
    case Strategy::Dart: return sample_dart(map, config);
  }
  return sample_greedy(map, config);
}

}  // namespace infopatch
