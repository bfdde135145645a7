#include "infopatch/manifest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "infopatch/error.hpp"
#include "infopatch/png_io.hpp"

namespace infopatch {

using nlohmann::ordered_json;

namespace {

ordered_json score_to_json(float score) {
  if (std::isinf(score) && score > 0) return "inf";
  return static_cast<double>(score);
}

float score_from_json(const ordered_json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<float>::infinity();
  if (!j.is_number()) throw_data_error("manifest: score must be a number or \"inf\"");
  return static_cast<float>(j.get<double>());
}

template <typename T>
T field(const ordered_json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw_data_error(std::string("manifest: missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_data_error(std::string("manifest: field '") + name + "' has the wrong type");
  }
}

}  // namespace

Manifest make_manifest(const ImportanceMap& map, const SamplingConfig& config, const Selection& selection,
                       std::string image, std::string hr_path, std::string lr_path) {
  const PatchGeometry& g = map.geometry();
  const int s = g.scale().value();
  if (g.stride() % s != 0) {
    throw_data_error("stride " + std::to_string(g.stride()) + " is not a multiple of scale " +
                     std::to_string(s) + "; LR anchors would be fractional");
  }
  Manifest m;
  m.image = std::move(image);
  m.hr_path = std::move(hr_path);
  m.lr_source = lr_path.empty() ? "bicubic" : "provided";
  m.lr_path = std::move(lr_path);
  m.scale = s;
  m.patch_size = g.patch_size();
  m.stride = g.stride();
  m.metric = map.metric();
  m.strategy = config.strategy;
  if (config.size.is_portion()) {
    m.portion = config.size.portion_value();
  } else {
    m.count = config.size.count_value();
  }
  m.nms_iou_threshold = config.nms_iou_threshold;
  m.seed = config.seed;
  m.total_anchors = map.size();
  m.requested = selection.requested;
  m.entries.reserve(selection.entries.size());
  for (const PatchCandidate& c : selection.entries) {
    m.entries.push_back({c.u, c.v, c.u / s, c.v / s, c.score});
  }
  return m;
}

ordered_json manifest_to_json(const Manifest& m) {
  ordered_json j;
  j["image"] = m.image;
  j["hr_path"] = m.hr_path;
  j["lr_path"] = m.lr_path;
  j["lr_source"] = m.lr_source;
  j["scale"] = m.scale;
  j["patch_size"] = m.patch_size;
  j["stride"] = m.stride;
  j["metric"] = std::string(to_string(m.metric));
  j["strategy"] = std::string(to_string(m.strategy));
  j["portion"] = m.portion ? ordered_json(*m.portion) : ordered_json(nullptr);
  j["count"] = m.count ? ordered_json(*m.count) : ordered_json(nullptr);
  j["nms_iou_threshold"] = m.nms_iou_threshold;
  j["seed"] = m.seed;
  j["total_anchors"] = m.total_anchors;
  j["requested"] = m.requested;
  j["selected"] = m.entries.size();
  ordered_json entries = ordered_json::array();
  for (const ManifestEntry& e : m.entries) {
    ordered_json item;
    item["u"] = e.u;
    item["v"] = e.v;
    item["lr_u"] = e.lr_u;
    item["lr_v"] = e.lr_v;
    item["score"] = score_to_json(e.score);
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j;
}

Manifest manifest_from_json(const ordered_json& j) {
  if (!j.is_object()) throw_data_error("manifest: top level must be an object");
  Manifest m;
  m.image = field<std::string>(j, "image");
  m.hr_path = field<std::string>(j, "hr_path");
  m.lr_path = field<std::string>(j, "lr_path");
  m.lr_source = field<std::string>(j, "lr_source");
  m.scale = ScaleFactor(field<int>(j, "scale")).value();
  m.patch_size = field<int>(j, "patch_size");
  m.stride = field<int>(j, "stride");
  m.metric = parse_metric(field<std::string>(j, "metric"));
  m.strategy = parse_strategy(field<std::string>(j, "strategy"));
  if (const auto& p = j.at("portion"); !p.is_null()) m.portion = field<double>(j, "portion");
  if (const auto& c = j.at("count"); !c.is_null()) m.count = field<std::size_t>(j, "count");
  if (m.portion.has_value() == m.count.has_value()) {
    throw_data_error("manifest: exactly one of 'portion' and 'count' must be set");
  }
  m.nms_iou_threshold = field<double>(j, "nms_iou_threshold");
  m.seed = field<std::uint64_t>(j, "seed");
  m.total_anchors = field<std::size_t>(j, "total_anchors");
  m.requested = field<std::size_t>(j, "requested");
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw_data_error("manifest: 'entries' must be an array");
  for (const auto& item : entries) {
    ManifestEntry e;
    e.u = field<int>(item, "u");
    e.v = field<int>(item, "v");
    e.lr_u = field<int>(item, "lr_u");
    e.lr_v = field<int>(item, "lr_v");
    e.score = score_from_json(item.at("score"));
    m.entries.push_back(e);
  }
  if (field<std::size_t>(j, "selected") != m.entries.size()) {
    throw_data_error("manifest: 'selected' does not match the number of entries");
  }
  return m;
}

std::string encode_manifest(const Manifest& manifest) {
  return manifest_to_json(manifest).dump(2) + "\n";
}

Manifest decode_manifest(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw_data_error(std::string("manifest: invalid JSON: ") + e.what());
  }
  try {
    return manifest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw_data_error(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  const std::string text = encode_manifest(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io_error("cannot write " + path.string());
  out << text;
  if (!out) throw_io_error("write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io_error("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_manifest(text);
}

std::size_t export_crops(const Manifest& manifest, const Raster& hr, const Raster& lr,
                         const std::filesystem::path& out_dir, const std::string& stem) {
  const int s = manifest.scale;
  const int k = manifest.patch_size;
  if (k < 1 || k % s != 0) throw_data_error("geometry mismatch: patch size not divisible by scale");
  if (lr.width() * s != hr.width() || lr.height() * s != hr.height() || lr.channels() != hr.channels()) {
    throw_data_error("geometry mismatch: LR image is not HR / " + std::to_string(s));
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    if (e.u < 0 || e.v < 0 || e.u + k > hr.height() || e.v + k > hr.width() || e.u % s != 0 ||
        e.v % s != 0 || e.lr_u * s != e.u || e.lr_v * s != e.v) {
      throw_data_error("geometry mismatch: entry " + std::to_string(i) + " at (" + std::to_string(e.u) +
                       ", " + std::to_string(e.v) + ") does not fit " + std::to_string(hr.width()) + "x" +
                       std::to_string(hr.height()) + " with k=" + std::to_string(k));
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw_io_error("cannot create " + out_dir.string() + ": " + ec.message());

  const int lk = k / s;
  std::size_t written = 0;
  char suffix[32];
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    std::snprintf(suffix, sizeof suffix, "_%06zu_", i);
    save_image(hr.crop(e.u, e.v, k, k), out_dir / (stem + suffix + "hr.png"));
    save_image(lr.crop(e.lr_u, e.lr_v, lk, lk), out_dir / (stem + suffix + "lr.png"));
    written += 2;
  }
  return written;
}

}  // namespace infopatch
