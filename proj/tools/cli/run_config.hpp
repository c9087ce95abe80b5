#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "graphforge/config.hpp"
#include "graphforge/eval.hpp"
#include "graphforge/graph.hpp"
#include "graphforge/lsh.hpp"
#include "graphforge/model.hpp"
#include "graphforge/propagation.hpp"

namespace graphforge::cli {

enum class Subcommand { train, build, classify, eval, lsh_audit };

std::string_view to_string(Subcommand sub);
Subcommand parse_subcommand(std::string_view name);

/// Command-line values that override config-file keys.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool all_pairs = false;
  std::optional<std::string> rule;
  std::optional<double> epsilon;
  std::optional<std::size_t> top_k;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::train;
  std::filesystem::path dataset_path;
  std::filesystem::path schema_path;
  std::filesystem::path model_path;
  std::filesystem::path graph_path;
  std::filesystem::path output_path;
  std::optional<SketchConfig> sketch;
  BuildConfig build;
  TrainConfig train;
  Architecture arch;
  PropagationConfig propagation;
  ProtocolConfig protocol;
  RbfBaselineConfig rbf;
  double holdout_fraction = 0.2;
  std::string eval_method = "learned";  // learned | rbf | both
  double audit_r = 0.9;
  double audit_cr = 0.5;
  std::size_t audit_sample = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool all_pairs = false;

  /// Reads `cfg` (relative paths resolve against `base_dir`), applies
  /// `overrides`, derives every component seed from the root seed and checks
  /// that the paths the subcommand needs are present.
  static RunConfig resolve(Subcommand sub, const KeyValueConfig& cfg, const std::filesystem::path& base_dir,
                           const Overrides& overrides);

  /// Loads the config file at `path` and resolves it.
  static RunConfig load(Subcommand sub, const std::filesystem::path& path, const Overrides& overrides);
};

}  // namespace graphforge::cli
