#include "infopatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "infopatch/error.hpp"
#include "infopatch/heatmap.hpp"
#include "infopatch/manifest.hpp"
#include "infopatch/map_io.hpp"
#include "infopatch/png_io.hpp"
#include "infopatch/resample.hpp"

namespace infopatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

const json* optional_field(const json& config, const char* name) {
  const auto it = config.find(name);
  return it == config.end() || it->is_null() ? nullptr : &*it;
}

const json& required_field(const json& config, const char* name) {
  const json* value = optional_field(config, name);
  if (!value) throw ConfigError(name, "missing required field");
  return *value;
}

std::string as_string(const json& value, const char* name) {
  if (!value.is_string()) throw ConfigError(name, "expected a string");
  return value.get<std::string>();
}

long long as_integer(const json& value, const char* name) {
  if (!value.is_number_integer()) throw ConfigError(name, "expected an integer");
  return value.get<long long>();
}

double as_number(const json& value, const char* name) {
  if (!value.is_number()) throw ConfigError(name, "expected a number");
  return value.get<double>();
}

bool as_bool(const json& value, const std::string& name) {
  if (!value.is_boolean()) throw ConfigError(name, "expected true or false");
  return value.get<bool>();
}

int as_int(const json& value, const char* name) {
  const long long v = as_integer(value, name);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(name, "out of range");
  }
  return static_cast<int>(v);
}

// Re-labels core validation failures with the config field that caused them.
template <typename F>
auto with_field(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(name, e.what());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw_io_error("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

ImageReport process_image(const DatasetJob& job, const fs::path& hr_path) {
  ImageReport report;
  report.stem = hr_path.stem().string();
  Stopwatch clock;
  try {
    const ScaleFactor s = job.geometry.scale();
    const Raster hr = crop_to_multiple(load_image(hr_path), s);
    report.times.load_ms = clock.lap_ms();

    Raster lr;
    std::string lr_path;
    if (job.lr_dir) {
      const fs::path provided = *job.lr_dir / hr_path.filename();
      lr = load_image(provided);
      if (lr.width() * s.value() != hr.width() || lr.height() * s.value() != hr.height()) {
        throw_data_error("provided LR " + provided.string() + " is " + std::to_string(lr.width()) + "x" +
                         std::to_string(lr.height()) + ", expected HR / " + std::to_string(s.value()));
      }
      lr_path = provided.string();
      report.lr_source = "provided";
    } else {
      lr = bicubic_downscale(hr, s);
      report.lr_source = "bicubic";
    }
    report.times.degrade_ms = clock.lap_ms();

    const ImportanceMap map = score_map(hr, lr, job.geometry, job.metric);
    report.anchors = map.size();
    report.times.score_ms = clock.lap_ms();

    const Selection selection = sample(map, job.sampling);
    const Manifest manifest = make_manifest(map, job.sampling, selection, report.stem, hr_path.string(), lr_path);
    report.selected = manifest.entries.size();
    report.times.sample_ms = clock.lap_ms();

    const fs::path& out = job.output_dir;
    if (job.emit.maps) write_map(map, out / "maps" / (report.stem + ".iimp"));
    if (job.emit.manifests) write_manifest(manifest, out / "manifests" / (report.stem + ".json"));
    if (job.emit.heatmaps) emit_heatmap(map, out / "heatmaps" / (report.stem + ".png"));
    if (job.emit.crops) export_crops(manifest, hr, lr, out / "crops" / report.stem, report.stem);
    report.times.write_ms = clock.lap_ms();
    report.ok = true;
  } catch (const std::exception& e) {
    report.ok = false;
    report.error = e.what();
  }
  return report;
}

json times_to_json(const StageTimes& t) {
  json j;
  j["load"] = t.load_ms;
  j["degrade"] = t.degrade_ms;
  j["score"] = t.score_ms;
  j["sample"] = t.sample_ms;
  j["write"] = t.write_ms;
  return j;
}

}  // namespace

StageTimes& StageTimes::operator+=(const StageTimes& other) noexcept {
  load_ms += other.load_ms;
  degrade_ms += other.degrade_ms;
  score_ms += other.score_ms;
  sample_ms += other.sample_ms;
  write_ms += other.write_ms;
  return *this;
}

std::vector<const ImageReport*> DatasetReport::failures() const {
  std::vector<const ImageReport*> out;
  for (const auto& img : images) {
    if (!img.ok) out.push_back(&img);
  }
  return out;
}

DatasetJob job_from_json(const json& config) {
  if (!config.is_object()) throw ConfigError("$", "config must be a JSON object");
  static const std::set<std::string> known = {
      "input", "output", "lr_input", "scale", "patch_size", "stride", "metric", "strategy",
      "portion", "count", "iou_threshold", "dart_max_attempts", "seed", "emit", "workers"};
  for (const auto& item : config.items()) {
    if (!known.contains(item.key())) throw ConfigError(item.key(), "unknown field");
  }

  const fs::path input = as_string(required_field(config, "input"), "input");
  const fs::path output = as_string(required_field(config, "output"), "output");
  const int scale_value = as_int(required_field(config, "scale"), "scale");
  const ScaleFactor scale = with_field("scale", [&] { return ScaleFactor(scale_value); });
  const int patch_size = as_int(required_field(config, "patch_size"), "patch_size");
  std::optional<int> stride;
  if (const json* v = optional_field(config, "stride")) stride = as_int(*v, "stride");
  const PatchGeometry geometry = with_field("patch_size", [&] { return PatchGeometry(patch_size, scale, stride); });

  DatasetJob job{input, output, std::nullopt, geometry, MetricKind::PsnrBilinear, SamplingConfig{}, EmitFlags{}, 1};
  if (const json* v = optional_field(config, "lr_input")) job.lr_dir = fs::path(as_string(*v, "lr_input"));
  if (const json* v = optional_field(config, "metric")) {
    const std::string name = as_string(*v, "metric");
    job.metric = with_field("metric", [&] { return parse_metric(name); });
  }

  SamplingConfig& sampling = job.sampling;
  const std::string strategy = as_string(required_field(config, "strategy"), "strategy");
  sampling.strategy = with_field("strategy", [&] { return parse_strategy(strategy); });
  const json* portion = optional_field(config, "portion");
  const json* count = optional_field(config, "count");
  if ((portion == nullptr) == (count == nullptr)) {
    throw ConfigError("portion", "exactly one of 'portion' and 'count' must be given");
  }
  if (portion) {
    const double p = as_number(*portion, "portion");
    sampling.size = with_field("portion", [&] { return SelectionSize::portion(p); });
  } else {
    const long long n = as_integer(*count, "count");
    if (n < 1) throw ConfigError("count", "must be at least 1");
    sampling.size = SelectionSize::count(static_cast<std::size_t>(n));
  }
  if (const json* v = optional_field(config, "iou_threshold")) {
    sampling.nms_iou_threshold = as_number(*v, "iou_threshold");
    if (!(sampling.nms_iou_threshold >= 0.0 && sampling.nms_iou_threshold < 1.0)) {
      throw ConfigError("iou_threshold", "must lie in [0, 1)");
    }
  }
  if (const json* v = optional_field(config, "dart_max_attempts")) {
    const long long n = as_integer(*v, "dart_max_attempts");
    if (n < 1) throw ConfigError("dart_max_attempts", "must be positive");
    sampling.dart_max_attempts = static_cast<std::size_t>(n);
  }
  if (const json* v = optional_field(config, "seed")) {
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    sampling.seed = v->get<std::uint64_t>();
  } else if (sampling.strategy == Strategy::Dart) {
    throw ConfigError("seed", "required for the dart strategy");
  }
  if (const json* v = optional_field(config, "emit")) {
    if (!v->is_object()) throw ConfigError("emit", "expected an object");
    for (const auto& item : v->items()) {
      const std::string path = "emit." + item.key();
      if (item.key() == "maps") job.emit.maps = as_bool(item.value(), path);
      else if (item.key() == "manifests") job.emit.manifests = as_bool(item.value(), path);
      else if (item.key() == "heatmaps") job.emit.heatmaps = as_bool(item.value(), path);
      else if (item.key() == "crops") job.emit.crops = as_bool(item.value(), path);
      else throw ConfigError(path, "unknown field");
    }
  }
  if (const json* v = optional_field(config, "workers")) {
    const int workers = as_int(*v, "workers");
    if (workers < 1) throw ConfigError("workers", "must be at least 1");
    job.workers = static_cast<unsigned>(workers);
  }
  return job;
}

nlohmann::ordered_json report_to_json(const DatasetReport& report) {
  nlohmann::ordered_json j;
  j["images"] = report.images_processed;
  j["anchors"] = report.anchors_scored;
  j["wall_ms"] = report.wall_ms;
  j["stage_ms"] = times_to_json(report.stages);
  nlohmann::ordered_json per_image = nlohmann::ordered_json::array();
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const ImageReport& img : report.images) {
    if (!img.ok) {
      failures.push_back({{"image", img.stem}, {"error", img.error}});
      continue;
    }
    nlohmann::ordered_json item;
    item["image"] = img.stem;
    item["lr_source"] = img.lr_source;
    item["anchors"] = img.anchors;
    item["selected"] = img.selected;
    item["stage_ms"] = times_to_json(img.times);
    per_image.push_back(std::move(item));
  }
  j["per_image"] = std::move(per_image);
  j["failures"] = std::move(failures);
  return j;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw_io_error("input directory " + dir.string() + " does not exist");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(entry.path());
  }
  if (ec) throw_io_error("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

DatasetReport run_dataset(const DatasetJob& job) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<fs::path> images = list_images(job.input_dir);
  if (images.empty()) throw_data_error("no PNG images in " + job.input_dir.string());

  ensure_directory(job.output_dir);
  if (job.emit.maps) ensure_directory(job.output_dir / "maps");
  if (job.emit.manifests) ensure_directory(job.output_dir / "manifests");
  if (job.emit.heatmaps) ensure_directory(job.output_dir / "heatmaps");
  if (job.emit.crops) ensure_directory(job.output_dir / "crops");

  DatasetReport report;
  report.images.resize(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++) {
      report.images[i] = process_image(job, images[i]);
    }
  };
  const unsigned workers = std::clamp<unsigned>(job.workers, 1u, static_cast<unsigned>(images.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (const ImageReport& img : report.images) {
    if (!img.ok) continue;
    ++report.images_processed;
    report.anchors_scored += img.anchors;
    report.stages += img.times;
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::ofstream out(job.output_dir / "report.json", std::ios::trunc);
  if (!out) throw_io_error("cannot write " + (job.output_dir / "report.json").string());
  out << report_to_json(report).dump(2) << "\n";
  return report;
}

}  // namespace infopatch
