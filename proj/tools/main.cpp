#include <CLI11.hpp>
#include <iostream>

#include "bevclust/errors.hpp"
#include "commands.hpp"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal error.
int run(const std::function<void()>& command) {
  try {
    command();
    return 0;
  } catch (const bevclust::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bevclust::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bevclust::ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

void add_override_flags(CLI::App* cmd, bevclust::cli::ConfigOverrides& overrides) {
  cmd->add_option("--k", overrides.k, "Neighbor count (overrides config)");
  cmd->add_option("--margin", overrides.margin, "Box-splitting margin (overrides config)");
  cmd->add_option("--epsilon", overrides.epsilon, "Dichotomy floor (overrides config)");
  cmd->add_option("--threshold-mode", overrides.threshold_mode,
                  "constant | range_proportional (overrides config)");
  cmd->add_option("--range-coefficient", overrides.range_coefficient,
                  "Coefficient for range_proportional mode");
  cmd->add_option("--min-segment-points", overrides.min_segment_points,
                  "Unmatched segments below this size are not counted FP/FN");
}

void add_config_flag(CLI::App* cmd, std::filesystem::path& path) {
  cmd->add_option("--config,-c", path, "Class/parameter config file")
      ->envname("BEVCLUST_CONFIG");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bevclust: BEV kNN-graph clustering of semantic point clouds into panoptic instances"};
  app.require_subcommand(1);

  bevclust::cli::ClusterOptions cluster;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "Cluster scans into instance label files");
  cluster_cmd->add_option("--scans", cluster.scans_dir, "Scan directory (.bin or .txt)")
      ->required();
  cluster_cmd->add_option("--preds", cluster.preds_dir,
                          "Semantic prediction directory (.label; not used for .txt scans)");
  cluster_cmd->add_option("--out", cluster.out_dir, "Output directory")->required();
  add_config_flag(cluster_cmd, cluster.config_path);
  cluster_cmd->add_flag("!--no-split", cluster.split, "Disable box splitting");
  cluster_cmd->add_flag("!--no-remap", cluster.apply_remap, "Do not apply the config remap table");
  cluster_cmd->add_option("--jobs", cluster.jobs, "Process scans in parallel (default 1)");
  add_override_flags(cluster_cmd, cluster.overrides);

  bevclust::cli::EvalOptions eval;
  std::string eval_mode = "plain";
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate panoptic predictions");
  eval_cmd->add_option("--preds", eval.preds_dir, "Prediction directory (.label or .txt)");
  eval_cmd->add_option("--gt", eval.gt_dir, "Ground-truth directory (.label or .txt)")
      ->required();
  eval_cmd->add_option("--scans", eval.scans_dir,
                       "Scan directory (needed for semantic-oracle mode and distance bins)");
  eval_cmd->add_option("--out", eval.out_dir, "Report output directory");
  add_config_flag(eval_cmd, eval.config_path);
  eval_cmd->add_option("--mode", eval_mode, "plain | semantic-oracle | instance-oracle")
      ->check(CLI::IsMember({"plain", "semantic-oracle", "instance-oracle"}));
  eval_cmd->add_option("--distance-bins", eval.bin_edges,
                       "Ascending bin edges in meters, e.g. 0 15 30");
  eval_cmd->add_flag("!--no-split", eval.split, "Disable box splitting (semantic-oracle mode)");
  eval_cmd->add_flag("!--no-remap", eval.apply_remap, "Do not apply the config remap table");
  add_override_flags(eval_cmd, eval.overrides);

  bevclust::cli::GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate synthetic scans with ground truth");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  add_config_flag(gen_cmd, gen.config_path);
  gen_cmd->add_option("--seed", gen.seed, "Base seed (scan i uses seed + i)");
  gen_cmd->add_option("--scans", gen.scan_count, "Number of scans");
  gen_cmd->add_option("--points", gen.points, "Target points per scan");
  gen_cmd->add_option("--objects", gen.objects, "Thing objects per scan");
  gen_cmd->add_option("--field-radius", gen.field_radius, "Placement radius in meters");
  gen_cmd->add_option("--min-clearance", gen.min_clearance,
                      "Minimum gap between object footprints in meters");
  gen_cmd->add_flag("!--no-falloff", gen.density_falloff,
                    "Uniform density instead of range falloff");
  gen_cmd->add_flag("!--no-text", gen.write_text, "Skip text output");
  gen_cmd->add_flag("!--no-binary", gen.write_binary, "Skip binary output");
  gen_cmd->add_option("--pair-class", gen.pair_class,
                      "Fixture mode: two blobs of this class with --pair-gap between them");
  gen_cmd->add_option("--pair-gap", gen.pair_gap, "Bumper gap for --pair-class, meters");
  add_override_flags(gen_cmd, gen.overrides);

  bevclust::cli::BenchOptions bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Measure clustering throughput on synthetic scans");
  add_config_flag(bench_cmd, bench.config_path);
  bench_cmd->add_option("--scans", bench.scan_count, "Number of scans");
  bench_cmd->add_option("--points", bench.points, "Target points per scan");
  bench_cmd->add_option("--objects", bench.objects, "Thing objects per scan");
  bench_cmd->add_flag("--split", bench.split, "Enable box splitting (off by default)");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  add_override_flags(bench_cmd, bench.overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*cluster_cmd) return run([&] { bevclust::cli::cmd_cluster(cluster, std::cout); });
  if (*eval_cmd) {
    if (eval_mode == "semantic-oracle") {
      eval.mode = bevclust::cli::EvalMode::kSemanticOracle;
    } else if (eval_mode == "instance-oracle") {
      eval.mode = bevclust::cli::EvalMode::kInstanceOracle;
    }
    return run([&] { bevclust::cli::cmd_eval(eval, std::cout); });
  }
  if (*gen_cmd) return run([&] { bevclust::cli::cmd_gen(gen, std::cout); });
  if (*bench_cmd) return run([&] { bevclust::cli::cmd_bench(bench, std::cout); });
  return 1;
}
