#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "infopatch/importance.hpp"

namespace infopatch {

enum class Strategy { Greedy, Nms, Dart };

std::string_view to_string(Strategy strategy) noexcept;
Strategy parse_strategy(std::string_view name);

/// A scored anchor in HR pixel coordinates.
struct PatchCandidate {
  int u = 0;
  int v = 0;
  float score = 0.0f;

  friend bool operator==(const PatchCandidate&, const PatchCandidate&) = default;
};

/// Either a portion p in (0, 1] or an explicit count n >= 1.
class SelectionSize {
public:
  static SelectionSize portion(double p);
  static SelectionSize count(std::size_t n);

  bool is_portion() const noexcept { return portion_.has_value(); }
  double portion_value() const { return portion_.value(); }
  std::size_t count_value() const { return count_.value(); }

  /// Number of patches to select out of `total_anchors`.
  std::size_t resolve(std::size_t total_anchors) const;

private:
  std::optional<double> portion_;
  std::optional<std::size_t> count_;
};

struct SamplingConfig {
  Strategy strategy = Strategy::Greedy;
  SelectionSize size = SelectionSize::portion(0.1);
  double nms_iou_threshold = 0.0;
  /// Consecutive rejected darts before phase 1 stops; 0 means 10 * requested.
  std::size_t dart_max_attempts = 0;
  std::uint64_t seed = 0;
};

/// max(1, floor(p * total_anchors)). Throws when p is outside (0, 1] or
/// total_anchors is 0.
std::size_t resolve_count(double portion, std::size_t total_anchors);

/// Intersection-over-union of two k x k squares.
double iou(const PatchCandidate& a, const PatchCandidate& b, int k) noexcept;

/// True when `a` is strictly more informative than `b` under `metric`, with
/// (u, v) lexicographic order breaking ties. +inf PSNR sorts last.
bool more_informative(const PatchCandidate& a, const PatchCandidate& b, MetricKind metric) noexcept;

/// Result of one sampling run, ordered by informativeness.
struct Selection {
  std::size_t requested = 0;
  std::vector<PatchCandidate> entries;
};

Selection sample_greedy(const ImportanceMap& map, const SamplingConfig& config);
Selection sample_nms(const ImportanceMap& map, const SamplingConfig& config);
Selection sample_dart(const ImportanceMap& map, const SamplingConfig& config);

/// Dispatches on config.strategy.
Selection sample(const ImportanceMap& map, const SamplingConfig& config);

/// Every anchor of the map, fully sorted by informativeness.
std::vector<PatchCandidate> ranked_candidates(const ImportanceMap& map);

}  // namespace infopatch
