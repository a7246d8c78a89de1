#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "bevclust/cluster.hpp"
#include "bevclust/errors.hpp"
#include "bevclust/io.hpp"
#include "bevclust/metrics.hpp"
#include "bevclust/synth.hpp"

namespace bevclust::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::duration d) {
  return std::chrono::duration_cast<std::chrono::duration<double>>(d).count();
}

struct ScenePair {
  PointCloud cloud;                   // xyz always, semantics filled by loader
  std::vector<std::uint32_t> instance;  // instance channel of the labeling read
};

bool is_scan_file(const fs::path& p) {
  return p.extension() == ".bin" || p.extension() == ".txt";
}

std::vector<fs::path> list_scans(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_scan_file(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no .bin or .txt scans in " + dir.string());
  return out;
}

std::vector<fs::path> list_labels(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() &&
        (entry.path().extension() == ".label" || entry.path().extension() == ".txt")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no .label or .txt files in " + dir.string());
  return out;
}

// A scan (.bin + paired .label semantics, or a self-contained .txt scene).
ScenePair load_scene(const fs::path& scan_path, const fs::path& labels_path) {
  ScenePair out;
  if (scan_path.extension() == ".txt") {
    const TextScene scene = read_text_scene(scan_path);
    out.cloud = scene.cloud;
    out.instance = scene.has_instance
                       ? scene.instance
                       : std::vector<std::uint32_t>(scene.cloud.size(), 0);
    return out;
  }
  const ScanData scan = read_scan(scan_path);
  const LabelData labels = read_labels(labels_path);
  if (labels.size() != scan.size()) {
    throw FormatError(scan_path.string() + " has " + std::to_string(scan.size()) +
                      " points but " + labels_path.string() + " has " +
                      std::to_string(labels.size()));
  }
  out.cloud.xyz = scan.xyz;
  out.cloud.semantic = labels.semantic;
  out.instance = labels.instance;
  return out;
}

// Labels alone (.label, or the semantic/instance columns of a .txt scene).
InstanceLabeling load_labeling(const fs::path& path) {
  InstanceLabeling out;
  if (path.extension() == ".txt") {
    const TextScene scene = read_text_scene(path);
    out.semantic = scene.cloud.semantic;
    out.instance = scene.has_instance ? scene.instance
                                      : std::vector<std::uint32_t>(scene.cloud.size(), 0);
    return out;
  }
  const LabelData labels = read_labels(path);
  out.semantic = labels.semantic;
  out.instance = labels.instance;
  return out;
}

// Pairs every scan stem with a file of one of the given extensions in `dir`.
// All missing pairs are listed before aborting.
std::vector<fs::path> pair_files(const std::vector<fs::path>& scans, const fs::path& dir,
                                 const std::vector<std::string>& extensions,
                                 const std::string& what) {
  std::vector<fs::path> out;
  std::vector<std::string> missing;
  for (const fs::path& scan : scans) {
    fs::path found;
    for (const std::string& ext : extensions) {
      fs::path candidate = dir / (scan.stem().string() + ext);
      if (fs::exists(candidate)) {
        found = candidate;
        break;
      }
    }
    if (found.empty()) {
      missing.push_back(scan.stem().string());
    } else {
      out.push_back(found);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing " + what + " for " + std::to_string(missing.size()) + " scan(s):";
    for (const std::string& stem : missing) msg += " " + stem;
    throw IoError(msg);
  }
  return out;
}

void write_report_files(const fs::path& out_dir, const std::string& stem,
                        const PanopticReport& report) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / (stem + ".txt"));
    out << format_report_table(report);
  }
  {
    std::ofstream out(out_dir / (stem + ".kv"));
    out << format_report_kv(report);
  }
}

}  // namespace

ClassConfig load_config(const fs::path& path, const ConfigOverrides& overrides) {
  if (path.empty()) throw FormatError("no config file given (flag --config or BEVCLUST_CONFIG)");
  ClassConfig cfg = load_class_config(path);
  if (overrides.k) cfg.k = *overrides.k;
  if (overrides.margin) cfg.margin = *overrides.margin;
  if (overrides.epsilon) cfg.epsilon = *overrides.epsilon;
  if (overrides.threshold_mode) {
    if (*overrides.threshold_mode == "constant") {
      cfg.threshold_mode = ThresholdMode::kConstant;
    } else if (*overrides.threshold_mode == "range_proportional") {
      cfg.threshold_mode = ThresholdMode::kRangeProportional;
    } else {
      throw FormatError("bad threshold mode '" + *overrides.threshold_mode + "'");
    }
  }
  if (overrides.range_coefficient) cfg.range_coefficient = *overrides.range_coefficient;
  if (overrides.min_segment_points) cfg.min_segment_points = *overrides.min_segment_points;
  if (cfg.k < 1) throw FormatError("k must be >= 1");
  if (cfg.threshold_mode == ThresholdMode::kRangeProportional && cfg.range_coefficient <= 0) {
    throw FormatError("threshold mode range_proportional needs range_coefficient > 0");
  }
  return cfg;
}

void cmd_cluster(const ClusterOptions& options, std::ostream& log) {
  const ClassConfig cfg = load_config(options.config_path, options.overrides);
  const std::vector<fs::path> scans = list_scans(options.scans_dir);

  std::vector<fs::path> labels(scans.size());
  const bool text_mode = scans.front().extension() == ".txt";
  if (!text_mode) {
    if (options.preds_dir.empty()) {
      throw FormatError("binary scans need --preds with semantic .label files");
    }
    labels = pair_files(scans, options.preds_dir, {".label"}, "semantic predictions");
  }

  fs::create_directories(options.out_dir);

  std::vector<double> scan_seconds(scans.size(), 0.0);
  std::vector<std::size_t> scan_points(scans.size(), 0);
  std::atomic<std::size_t> cursor{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= scans.size()) return;
      ScenePair scene = load_scene(scans[i], labels[i]);
      if (options.apply_remap) apply_remap(scene.cloud.semantic, cfg);

      const auto start = Clock::now();
      const InstanceLabeling result = cluster_scan(scene.cloud, cfg, options.split);
      scan_seconds[i] = seconds(Clock::now() - start);
      scan_points[i] = scene.cloud.size();

      write_labels(options.out_dir / (scans[i].stem().string() + ".label"), result.semantic,
                   result.instance);
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  double total = 0.0;
  std::size_t points = 0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    total += scan_seconds[i];
    points += scan_points[i];
  }
  char line[160];
  std::snprintf(line, sizeof line,
                "clustered %zu scan(s), %zu points\n"
                "clustering time (I/O excluded): %.3f s total, %.2f ms/scan\n"
                "throughput: %.2f Hz\n",
                scans.size(), points, total, 1e3 * total / static_cast<double>(scans.size()),
                static_cast<double>(scans.size()) / total);
  log << line;
}

void cmd_eval(const EvalOptions& options, std::ostream& log) {
  const ClassConfig cfg = load_config(options.config_path, options.overrides);
  if (options.gt_dir.empty() || !fs::is_directory(options.gt_dir)) {
    throw IoError("eval needs --gt with ground-truth labels: " + options.gt_dir.string());
  }

  const std::vector<fs::path> gt_files = list_labels(options.gt_dir);
  const bool gt_is_text = gt_files.front().extension() == ".txt";

  const bool needs_cloud = options.mode == EvalMode::kSemanticOracle || !options.bin_edges.empty();
  std::vector<fs::path> scan_files;
  if (needs_cloud && !gt_is_text) {
    if (options.scans_dir.empty()) {
      throw FormatError("this evaluation needs --scans for point coordinates");
    }
    scan_files = pair_files(gt_files, options.scans_dir, {".bin", ".txt"}, "scans");
  }

  std::vector<fs::path> pred_files;
  if (options.mode != EvalMode::kSemanticOracle) {
    if (options.preds_dir.empty()) throw FormatError("this evaluation needs --preds");
    pred_files = pair_files(gt_files, options.preds_dir, {".label", ".txt"}, "predictions");
  }

  PanopticAccumulator accumulator(cfg);
  std::optional<BinnedPanopticAccumulator> binned;
  if (!options.bin_edges.empty()) {
    binned.emplace(cfg, bins_from_edges(options.bin_edges));
  }

  for (std::size_t i = 0; i < gt_files.size(); ++i) {
    InstanceLabeling gt = load_labeling(gt_files[i]);
    if (options.apply_remap) apply_remap(gt.semantic, cfg);

    PointCloud cloud;
    if (needs_cloud) {
      if (gt_is_text) {
        cloud = read_text_scene(gt_files[i]).cloud;
      } else {
        const ScanData scan = read_scan(scan_files[i]);
        cloud.xyz = scan.xyz;
      }
      cloud.semantic = gt.semantic;
      if (cloud.xyz.size() != gt.size()) {
        throw FormatError(gt_files[i].string() + ": scan/label point count mismatch");
      }
    }

    InstanceLabeling pred;
    switch (options.mode) {
      case EvalMode::kPlain:
        pred = load_labeling(pred_files[i]);
        if (options.apply_remap) apply_remap(pred.semantic, cfg);
        break;
      case EvalMode::kSemanticOracle:
        pred = cluster_scan(cloud, cfg, options.split);
        break;
      case EvalMode::kInstanceOracle: {
        InstanceLabeling raw = load_labeling(pred_files[i]);
        if (options.apply_remap) apply_remap(raw.semantic, cfg);
        pred = make_instance_oracle(raw.semantic, gt, cfg);
        break;
      }
    }
    if (pred.size() != gt.size()) {
      throw FormatError(gt_files[i].string() + ": prediction/ground-truth size mismatch");
    }

    accumulator.add_scan(pred, gt);
    if (binned) binned->add_scan(pred, gt, cloud);
  }

  const PanopticReport report = accumulator.report();
  log << format_report_table(report);
  if (!options.out_dir.empty()) write_report_files(options.out_dir, "report", report);

  if (binned) {
    const std::vector<PanopticReport> reports = binned->reports();
    for (std::size_t b = 0; b < reports.size(); ++b) {
      const RangeInterval& bin = binned->bins()[b];
      std::ostringstream name;
      name << "report_bin" << b << "_" << bin.lo << "m";
      log << "\n[distance bin " << bin.lo << " .. " << bin.hi << " m]\n"
          << format_report_table(reports[b]);
      if (!options.out_dir.empty()) write_report_files(options.out_dir, name.str(), reports[b]);
    }
  }
}

void cmd_gen(const GenOptions& options, std::ostream& log) {
  const ClassConfig cfg = load_config(options.config_path, options.overrides);
  if (!options.write_text && !options.write_binary) {
    throw FormatError("gen: nothing to write (both text and binary disabled)");
  }
  const fs::path scans_dir = options.out_dir / "scans";
  const fs::path labels_dir = options.out_dir / "labels";
  const fs::path text_dir = options.out_dir / "text";
  if (options.write_binary) {
    fs::create_directories(scans_dir);
    fs::create_directories(labels_dir);
  }
  if (options.write_text) fs::create_directories(text_dir);

  for (int s = 0; s < options.scan_count; ++s) {
    synth::Scene scene;
    if (options.pair_class) {
      const ClassInfo& cls = cfg.at(*options.pair_class);
      synth::Rng rng(options.seed + static_cast<std::uint64_t>(s));
      const double spacing = std::clamp(cls.width / 8.0, 0.03, 0.25);
      const synth::MergedRow row = synth::merged_row(
          cls, std::vector<double>{options.pair_gap}, spacing, 0.2, 0.0, {6.0, 0.0}, rng);
      for (std::size_t i = 0; i < row.points.size(); ++i) {
        scene.cloud.xyz.push_back({static_cast<float>(row.points[i].x),
                                   static_cast<float>(row.points[i].y), 0.0f});
        scene.cloud.semantic.push_back(cls.id);
        scene.gt_instance.push_back(row.blob_of_point[i] + 1);
      }
      scene.object_count = 2;
    } else {
      synth::SceneParams params;
      params.seed = options.seed + static_cast<std::uint64_t>(s);
      params.target_points = options.points;
      params.object_count = options.objects;
      params.field_radius = options.field_radius;
      params.min_clearance = options.min_clearance;
      params.density_falloff = options.density_falloff;
      scene = synth::generate_scene(params, cfg);
    }

    char stem[16];
    std::snprintf(stem, sizeof stem, "%06d", s);
    if (options.write_binary) {
      ScanData scan;
      scan.xyz = scene.cloud.xyz;
      scan.intensity.assign(scene.cloud.size(), 0.0f);
      write_scan(scans_dir / (std::string(stem) + ".bin"), scan);
      write_labels(labels_dir / (std::string(stem) + ".label"), scene.cloud.semantic,
                   scene.gt_instance);
    }
    if (options.write_text) {
      write_text_scene(text_dir / (std::string(stem) + ".txt"), scene.cloud, scene.gt_instance);
    }
    log << "scan " << stem << ": " << scene.cloud.size() << " points, " << scene.object_count
        << " objects\n";
  }
}

void cmd_bench(const BenchOptions& options, std::ostream& log) {
  const ClassConfig cfg = load_config(options.config_path, options.overrides);

  std::vector<PointCloud> clouds;
  for (int s = 0; s < options.scan_count; ++s) {
    synth::SceneParams params;
    params.seed = options.seed + static_cast<std::uint64_t>(s);
    params.target_points = options.points;
    params.object_count = options.objects;
    clouds.push_back(synth::generate_scene(params, cfg).cloud);
  }

  // Warm-up pass, then the timed single-threaded run.
  (void)cluster_scan(clouds.front(), cfg, options.split);

  double total = 0.0;
  std::size_t points = 0;
  for (const PointCloud& cloud : clouds) {
    const auto start = Clock::now();
    const InstanceLabeling result = cluster_scan(cloud, cfg, options.split);
    total += seconds(Clock::now() - start);
    points += cloud.size();
    (void)result;
  }

  char line[200];
  std::snprintf(line, sizeof line,
                "%d scan(s), %zu points, k=%zu, split=%s\n"
                "clustering: %.3f s total, %.2f ms/scan\n"
                "throughput: %.2f Hz single-threaded\n",
                options.scan_count, points, cfg.k, options.split ? "on" : "off", total,
                1e3 * total / options.scan_count, options.scan_count / total);
  log << line;
}

}  // namespace bevclust::cli
