#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopatch/importance.hpp"
#include "infopatch/sampling.hpp"

namespace infopatch {

struct EmitFlags {
  bool maps = true;
  bool manifests = true;
  bool heatmaps = true;
  bool crops = true;
};

struct DatasetJob {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  /// Pre-rendered LR images with the same stems; synthesized when empty.
  std::optional<std::filesystem::path> lr_dir;
  PatchGeometry geometry;
  MetricKind metric = MetricKind::PsnrBilinear;
  SamplingConfig sampling;
  EmitFlags emit;
  unsigned workers = 1;
};

/// Parses the `run` config schema. Throws ConfigError naming the offending
/// field path (e.g. "sampling.portion").
DatasetJob job_from_json(const nlohmann::json& config);

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

struct StageTimes {
  double load_ms = 0.0;
  double degrade_ms = 0.0;
  double score_ms = 0.0;
  double sample_ms = 0.0;
  double write_ms = 0.0;

  StageTimes& operator+=(const StageTimes& other) noexcept;
  double total_ms() const noexcept {
    return load_ms + degrade_ms + score_ms + sample_ms + write_ms;
  }
};

struct ImageReport {
  std::string stem;
  bool ok = false;
  std::string error;
  std::string lr_source;  // "bicubic" or "provided"
  std::size_t anchors = 0;
  std::size_t selected = 0;
  StageTimes times;
};

struct DatasetReport {
  std::size_t images_processed = 0;
  std::size_t anchors_scored = 0;
  double wall_ms = 0.0;
  StageTimes stages;
  std::vector<ImageReport> images;  // sorted by stem

  std::vector<const ImageReport*> failures() const;
};

nlohmann::ordered_json report_to_json(const DatasetReport& report);

/// PNG files directly under `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Per-image outputs under job.output_dir:
///   maps/{stem}.iimp  manifests/{stem}.json  heatmaps/{stem}.png
///   crops/{stem}/{stem}_{index:06}_{hr|lr}.png
/// and report.json at the root. A failing image is recorded in the report and
/// does not stop the run. Outputs other than report.json do not depend on
/// job.workers.
DatasetReport run_dataset(const DatasetJob& job);

}  // namespace infopatch
