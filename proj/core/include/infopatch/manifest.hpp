#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopatch/image.hpp"
#include "infopatch/importance.hpp"
#include "infopatch/sampling.hpp"

namespace infopatch {

struct ManifestEntry {
  int u = 0;
  int v = 0;
  int lr_u = 0;
  int lr_v = 0;
  float score = 0.0f;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Serialized selection plus provenance. lr_path is empty when the LR image was
/// synthesized in-process (lr_source == "bicubic").
struct Manifest {
  std::string image;
  std::string hr_path;
  std::string lr_path;
  std::string lr_source = "bicubic";
  int scale = 2;
  int patch_size = 0;
  int stride = 0;
  MetricKind metric = MetricKind::PsnrBilinear;
  Strategy strategy = Strategy::Greedy;
  std::optional<double> portion;
  std::optional<std::size_t> count;
  double nms_iou_threshold = 0.0;
  std::uint64_t seed = 0;
  std::size_t total_anchors = 0;
  std::size_t requested = 0;
  std::vector<ManifestEntry> entries;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Assembles a manifest from a selection. Throws a Data error when the map's
/// stride is not a multiple of the scale (LR coordinates would be fractional).
Manifest make_manifest(const ImportanceMap& map, const SamplingConfig& config,
                       const Selection& selection, std::string image, std::string hr_path,
                       std::string lr_path);

nlohmann::ordered_json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::ordered_json& json);

/// Two-space indented JSON followed by a newline.
std::string encode_manifest(const Manifest& manifest);
Manifest decode_manifest(const std::string& text);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// Writes {stem}_{index:06}_hr.png and {stem}_{index:06}_lr.png for every entry.
/// Returns the number of files written.
std::size_t export_crops(const Manifest& manifest, const Raster& hr, const Raster& lr,
                         const std::filesystem::path& out_dir, const std::string& stem);

}  // namespace infopatch
