#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bevclust/class_config.hpp"

namespace bevclust::cli {

/// Command-line overrides applied on top of the loaded config file.
struct ConfigOverrides {
  std::optional<std::size_t> k;
  std::optional<double> margin;
  std::optional<double> epsilon;
  std::optional<std::string> threshold_mode;  // "constant" | "range_proportional"
  std::optional<double> range_coefficient;
  std::optional<std::uint64_t> min_segment_points;
};

ClassConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides);

struct ClusterOptions {
  std::filesystem::path scans_dir;
  std::filesystem::path preds_dir;  // .label semantics; unused for .txt scans
  std::filesystem::path out_dir;
  std::filesystem::path config_path;
  bool split = true;
  bool apply_remap = true;
  int jobs = 1;
  ConfigOverrides overrides;
};

/// Clusters every scan and writes one .label file per scan (prediction
/// semantics passed through, instance ids from the pipeline). Prints a timing
/// summary; clustering time excludes file I/O.
void cmd_cluster(const ClusterOptions& options, std::ostream& log);

enum class EvalMode { kPlain, kSemanticOracle, kInstanceOracle };

struct EvalOptions {
  std::filesystem::path preds_dir;  // not needed for semantic-oracle mode
  std::filesystem::path gt_dir;
  std::filesystem::path scans_dir;  // needed for oracle mode and distance bins
  std::filesystem::path out_dir;    // optional; reports also go to the log
  std::filesystem::path config_path;
  EvalMode mode = EvalMode::kPlain;
  std::vector<double> bin_edges;  // e.g. {0, 15, 30}; empty = no binning
  bool split = true;              // used when clustering in semantic-oracle mode
  bool apply_remap = true;
  ConfigOverrides overrides;
};

void cmd_eval(const EvalOptions& options, std::ostream& log);

struct GenOptions {
  std::filesystem::path out_dir;
  std::filesystem::path config_path;
  std::uint64_t seed = 1;
  int scan_count = 1;
  std::size_t points = 120000;
  std::size_t objects = 40;
  double field_radius = 48.0;
  double min_clearance = 2.5;
  bool density_falloff = true;
  bool write_text = true;
  bool write_binary = true;
  // Fixture mode: a single row of two reference-box blobs with this gap.
  std::optional<std::uint32_t> pair_class;
  double pair_gap = 0.5;
  ConfigOverrides overrides;
};

/// Writes synthetic scans plus ground-truth labels, deterministic per seed.
void cmd_gen(const GenOptions& options, std::ostream& log);

struct BenchOptions {
  std::filesystem::path config_path;
  int scan_count = 5;
  std::size_t points = 120000;
  std::size_t objects = 40;
  bool split = false;
  std::uint64_t seed = 1;
  ConfigOverrides overrides;
};

/// Generates scans in memory and reports single-threaded clustering
/// throughput in Hz.
void cmd_bench(const BenchOptions& options, std::ostream& log);

}  // namespace bevclust::cli
