#include "infopatch/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "infopatch/png_io.hpp"

namespace infopatch {

Raster render_heatmap(const ImportanceMap& map) {
  const auto scores = map.scores();
  const bool higher_first = higher_is_more_informative(map.metric());

  // Anchors that take part in ranking, most informative first.
  std::vector<std::size_t> order;
  order.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isinf(scores[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_first ? scores[a] > scores[b] : scores[a] < scores[b];
  });

  Raster out(map.cols(), map.rows(), 1);
  auto pixels = out.data();
  const std::size_t n = order.size();
  for (std::size_t first = 0; first < n;) {
    std::size_t last = first;
    while (last + 1 < n && scores[order[last + 1]] == scores[order[first]]) ++last;
    const double avg_rank = 0.5 * static_cast<double>(first + last);
    const double r = n > 1 ? avg_rank / static_cast<double>(n - 1) : 0.5;
    const std::uint8_t value = quantize_sample(255.0 * (1.0 - r));
    for (std::size_t i = first; i <= last; ++i) pixels[order[i]] = value;
    first = last + 1;
  }
  return out;
}

void emit_heatmap(const ImportanceMap& map, const std::filesystem::path& path) {
  save_image(render_heatmap(map), path);
}

}  // namespace infopatch
