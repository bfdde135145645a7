#include "infopatch/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopatch/error.hpp"
#include "infopatch/heatmap.hpp"
#include "infopatch/importance.hpp"
#include "infopatch/manifest.hpp"
#include "infopatch/map_io.hpp"
#include "infopatch/pipeline.hpp"
#include "infopatch/png_io.hpp"
#include "infopatch/resample.hpp"
#include "infopatch/sampling.hpp"

namespace infopatch::cli {

namespace fs = std::filesystem;

namespace {

// Invalid flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<int> kScales = {2, 3, 4};

struct DegradeArgs {
  std::string input;
  std::string output;
  int scale = 2;
};

struct ScoreArgs {
  std::string hr;
  std::string lr;
  int scale = 2;
  int patch_size = 192;
  int stride = 0;
  std::string metric = "psnr-bilinear";
  std::string out_map;
  bool naive = false;
};

struct SampleArgs {
  std::string map;
  std::string strategy;
  std::optional<double> portion;
  std::optional<std::size_t> count;
  double iou_threshold = 0.0;
  std::optional<std::uint64_t> seed;
  std::size_t dart_max_attempts = 0;
  std::string out_manifest;
  std::string image_id;
  std::string hr_path;
  std::string lr_path;
};

struct CropArgs {
  std::string manifest;
  std::string hr;
  std::string lr;
  std::string out_dir;
};

struct HeatmapArgs {
  std::string map;
  std::string out;
};

struct BenchArgs {
  std::string hr;
  std::string lr;
  int scale = 2;
  int patch_size = 192;
  int stride = 0;
  int repeats = 3;
  bool json = false;
};

struct RunArgs {
  std::string config;
};

std::optional<int> stride_of(int stride) { return stride > 0 ? std::optional<int>(stride) : std::nullopt; }

// HR cropped to a multiple of s, and the matching LR (loaded or synthesized).
std::pair<Raster, Raster> load_pair(const std::string& hr_path, const std::string& lr_path, ScaleFactor s) {
  Raster hr = crop_to_multiple(load_image(hr_path), s);
  Raster lr = lr_path.empty() ? bicubic_downscale(hr, s) : load_image(lr_path);
  return {std::move(hr), std::move(lr)};
}

int cmd_degrade(const DegradeArgs& a, std::ostream& out) {
  const ScaleFactor s(a.scale);
  const fs::path input(a.input);
  std::vector<std::pair<fs::path, fs::path>> jobs;
  if (fs::is_directory(input)) {
    std::error_code ec;
    fs::create_directories(a.output, ec);
    if (ec) throw_io_error("cannot create " + a.output + ": " + ec.message());
    for (const fs::path& p : list_images(input)) jobs.emplace_back(p, fs::path(a.output) / p.filename());
  } else {
    jobs.emplace_back(input, fs::path(a.output));
  }
  for (const auto& [src, dst] : jobs) {
    const Raster hr = crop_to_multiple(load_image(src), s);
    const Raster lr = bicubic_downscale(hr, s);
    save_image(lr, dst);
    out << src.string() << " -> " << dst.string() << " (" << lr.width() << "x" << lr.height() << ")\n";
  }
  return kSuccess;
}

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const ScaleFactor s(a.scale);
  const PatchGeometry geometry(a.patch_size, s, stride_of(a.stride));
  const MetricKind metric = parse_metric(a.metric);
  const auto [hr, lr] = load_pair(a.hr, a.lr, s);
  ImportanceMap map = a.naive ? score_map_naive(hr, lr, geometry, metric) : score_map(hr, lr, geometry, metric);
  write_map(map, a.out_map);
  out << "scored " << map.size() << " anchors (" << map.rows() << "x" << map.cols() << ") -> " << a.out_map
      << "\n";
  return kSuccess;
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  if (a.portion.has_value() == a.count.has_value()) {
    throw_data_error("exactly one of --portion and --count must be given");
  }
  SamplingConfig config;
  config.strategy = parse_strategy(a.strategy);
  if (config.strategy == Strategy::Dart && !a.seed) {
    throw UsageError("--seed is required for --strategy dart");
  }
  config.size = a.portion ? SelectionSize::portion(*a.portion) : SelectionSize::count(*a.count);
  config.nms_iou_threshold = a.iou_threshold;
  config.dart_max_attempts = a.dart_max_attempts;
  config.seed = a.seed.value_or(0);

  const ImportanceMap map = read_map(a.map);
  const Selection selection = sample(map, config);
  const std::string image = a.image_id.empty() ? fs::path(a.map).stem().string() : a.image_id;
  const Manifest manifest = make_manifest(map, config, selection, image, a.hr_path, a.lr_path);
  write_manifest(manifest, a.out_manifest);
  out << "selected " << manifest.entries.size() << " of " << manifest.requested << " requested -> "
      << a.out_manifest << "\n";
  return kSuccess;
}

int cmd_crop(const CropArgs& a, std::ostream& out) {
  const Manifest manifest = read_manifest(a.manifest);
  const auto [hr, lr] = load_pair(a.hr, a.lr, ScaleFactor(manifest.scale));
  const std::string stem = manifest.image.empty() ? fs::path(a.hr).stem().string() : manifest.image;
  const std::size_t files = export_crops(manifest, hr, lr, a.out_dir, stem);
  out << "wrote " << files << " crops -> " << a.out_dir << "\n";
  return kSuccess;
}

int cmd_heatmap(const HeatmapArgs& a, std::ostream& out) {
  const ImportanceMap map = read_map(a.map);
  emit_heatmap(map, a.out);
  out << "heatmap " << map.cols() << "x" << map.rows() << " -> " << a.out << "\n";
  return kSuccess;
}

template <typename F>
double time_ms(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const ScaleFactor s(a.scale);
  const PatchGeometry geometry(a.patch_size, s, stride_of(a.stride));
  const auto [hr, lr] = load_pair(a.hr, a.lr, s);

  // The first run of each path doubles as the equality gate: no timing is
  // reported unless both paths agree bit for bit.
  std::optional<ImportanceMap> naive;
  std::optional<ImportanceMap> fast;
  double naive_ms = time_ms([&] { naive.emplace(score_map_naive(hr, lr, geometry)); });
  double fast_ms = time_ms([&] { fast.emplace(score_map_fast(hr, lr, geometry)); });
  if (!identical_scores(*naive, *fast)) {
    err << "error: fast and naive score maps differ\n";
    return kDataError;
  }
  for (int i = 1; i < a.repeats; ++i) {
    naive_ms = std::min(naive_ms, time_ms([&] { naive.emplace(score_map_naive(hr, lr, geometry)); }));
    fast_ms = std::min(fast_ms, time_ms([&] { fast.emplace(score_map_fast(hr, lr, geometry)); }));
  }
  const double speedup = fast_ms > 0.0 ? naive_ms / fast_ms : std::numeric_limits<double>::infinity();
  if (a.json) {
    nlohmann::ordered_json j;
    j["width"] = hr.width();
    j["height"] = hr.height();
    j["scale"] = a.scale;
    j["patch_size"] = geometry.patch_size();
    j["stride"] = geometry.stride();
    j["anchors"] = fast->size();
    j["repeats"] = a.repeats;
    j["equal"] = true;
    j["naive_ms"] = naive_ms;
    j["fast_ms"] = fast_ms;
    j["speedup"] = speedup;
    out << j.dump(2) << "\n";
  } else {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%dx%d k=%d stride=%d anchors=%zu\nnaive: %.3f ms\nfast:  %.3f ms\nspeedup: %.1fx\n",
                  hr.width(), hr.height(), geometry.patch_size(), geometry.stride(), fast->size(), naive_ms,
                  fast_ms, speedup);
    out << line;
  }
  return kSuccess;
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  std::ifstream in(a.config);
  if (!in) throw_io_error("cannot open config " + a.config);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  const DatasetJob job = job_from_json(config);
  const DatasetReport report = run_dataset(job);
  out << "processed " << report.images_processed << " of " << report.images.size() << " images, "
      << report.anchors_scored << " anchors, " << report.failures().size() << " failures\n";
  return kSuccess;
}

void add_scale(CLI::App& cmd, int& scale) {
  cmd.add_option("--scale", scale, "Scale factor")->required()->check(CLI::IsMember(kScales));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Informative patch scoring and sampling for super-resolution training", "infopatch"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  DegradeArgs degrade;
  auto* c_degrade = app.add_subcommand("degrade", "Crop to a multiple of the scale and bicubic-downscale");
  c_degrade->add_option("--input", degrade.input, "PNG file or directory of PNGs")->required();
  c_degrade->add_option("--output", degrade.output, "Output PNG file or directory")->required();
  add_scale(*c_degrade, degrade.scale);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Write the importance map (IIMP) of an HR/LR pair");
  c_score->add_option("--hr", score.hr, "HR PNG")->required();
  c_score->add_option("--lr", score.lr, "LR PNG (synthesized by bicubic downscale when omitted)");
  add_scale(*c_score, score.scale);
  c_score->add_option("--patch-size", score.patch_size, "HR patch size k")->required();
  c_score->add_option("--stride", score.stride, "Anchor stride in HR pixels (0 = scale)")->capture_default_str();
  c_score->add_option("--metric", score.metric, "psnr-bilinear, psnr-bilinear-y, std0, std1, std2, sobel, laplacian")->capture_default_str();
  c_score->add_option("--out-map", score.out_map, "Output IIMP file")->required();
  c_score->add_flag("--naive", score.naive, "Use the sliding-window reference instead of integral images");

  SampleArgs smp;
  auto* c_sample = app.add_subcommand("sample", "Select patches from an importance map");
  c_sample->add_option("--map", smp.map, "Input IIMP file")->required();
  c_sample->add_option("--strategy", smp.strategy, "greedy, nms or dart")
      ->required()
      ->check(CLI::IsMember({"greedy", "nms", "dart"}));
  c_sample->add_option("--portion", smp.portion, "Fraction of anchors to keep, in (0, 1]");
  c_sample->add_option("--count", smp.count, "Number of patches to keep");
  c_sample->add_option("--iou-threshold", smp.iou_threshold, "NMS suppression threshold in [0, 1)")->capture_default_str();
  c_sample->add_option("--seed", smp.seed, "Random seed (required for dart)");
  c_sample->add_option("--dart-max-attempts", smp.dart_max_attempts,
                       "Consecutive rejected darts before stopping (0 = 10 x requested)")
      ->capture_default_str();
  c_sample->add_option("--out-manifest", smp.out_manifest, "Output manifest JSON")->required();
  c_sample->add_option("--image-id", smp.image_id, "Image identifier (default: map file stem)");
  c_sample->add_option("--hr-path", smp.hr_path, "HR path recorded in the manifest");
  c_sample->add_option("--lr-path", smp.lr_path, "LR path recorded in the manifest");

  CropArgs crop;
  auto* c_crop = app.add_subcommand("crop", "Export HR/LR patch crops listed in a manifest");
  c_crop->add_option("--manifest", crop.manifest, "Manifest JSON")->required();
  c_crop->add_option("--hr", crop.hr, "HR PNG")->required();
  c_crop->add_option("--lr", crop.lr, "LR PNG (synthesized by bicubic downscale when omitted)");
  c_crop->add_option("--out-dir", crop.out_dir, "Output directory")->required();

  HeatmapArgs heat;
  auto* c_heatmap = app.add_subcommand("heatmap", "Render an importance map as a grayscale PNG");
  c_heatmap->add_option("--map", heat.map, "Input IIMP file")->required();
  c_heatmap->add_option("--out", heat.out, "Output PNG")->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time the sliding-window and integral-image scorers");
  c_bench->add_option("--hr", bench.hr, "HR PNG")->required();
  c_bench->add_option("--lr", bench.lr, "LR PNG (synthesized by bicubic downscale when omitted)");
  add_scale(*c_bench, bench.scale);
  c_bench->add_option("--patch-size", bench.patch_size, "HR patch size k")->required();
  c_bench->add_option("--stride", bench.stride, "Anchor stride in HR pixels (0 = scale)")->capture_default_str();
  c_bench->add_option("--repeats", bench.repeats, "Timed runs per path, best reported")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_bench->add_flag("--json", bench.json, "Print a JSON object instead of text");

  RunArgs runargs;
  auto* c_run = app.add_subcommand("run", "Run the dataset pipeline from a JSON config");
  c_run->add_option("--config", runargs.config, "Job config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*c_degrade) return cmd_degrade(degrade, out);
    if (*c_score) return cmd_score(score, out);
    if (*c_sample) return cmd_sample(smp, out);
    if (*c_crop) return cmd_crop(crop, out);
    if (*c_heatmap) return cmd_heatmap(heat, out);
    if (*c_bench) return cmd_bench(bench, out, err);
    if (*c_run) return cmd_run(runargs, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "error: config field " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? kIoError : kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kUsageError;
}

}  // namespace infopatch::cli
