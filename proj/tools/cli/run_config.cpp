#include "run_config.hpp"

#include "graphforge/error.hpp"
#include "graphforge/random.hpp"

namespace graphforge::cli {

std::string_view to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::train: return "train";
    case Subcommand::build: return "build";
    case Subcommand::classify: return "classify";
    case Subcommand::eval: return "eval";
    case Subcommand::lsh_audit: return "lsh-audit";
  }
  return "?";
}

Subcommand parse_subcommand(std::string_view name) {
  if (name == "train") return Subcommand::train;
  if (name == "build") return Subcommand::build;
  if (name == "classify") return Subcommand::classify;
  if (name == "eval") return Subcommand::eval;
  if (name == "lsh-audit") return Subcommand::lsh_audit;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

namespace {

std::filesystem::path path_key(const KeyValueConfig& cfg, const std::string& key, const std::filesystem::path& base) {
  auto v = cfg.get(key);
  if (!v || v->empty()) return {};
  std::filesystem::path p(*v);
  return p.is_absolute() ? p : base / p;
}

void need(const std::filesystem::path& p, std::string_view key, Subcommand sub) {
  if (p.empty())
    throw ConfigError("'" + std::string(to_string(sub)) + "' needs the '" + std::string(key) + "' path");
}

}  // namespace

RunConfig RunConfig::resolve(Subcommand sub, const KeyValueConfig& file, const std::filesystem::path& base_dir,
                             const Overrides& ov) {
  KeyValueConfig cfg = file;
  if (ov.seed) cfg.set("seed", std::to_string(*ov.seed));
  if (ov.threads) cfg.set("threads", std::to_string(*ov.threads));
  if (ov.rule) cfg.set("propagation.rule", *ov.rule);
  if (ov.epsilon) cfg.set("build.epsilon", format_exact(*ov.epsilon));
  if (ov.top_k) cfg.set("build.top_k", std::to_string(*ov.top_k));

  RunConfig r;
  r.subcommand = sub;
  r.dataset_path = path_key(cfg, "dataset", base_dir);
  r.schema_path = path_key(cfg, "schema", base_dir);
  r.model_path = path_key(cfg, "model", base_dir);
  r.graph_path = path_key(cfg, "graph", base_dir);
  r.output_path = path_key(cfg, "output", base_dir);
  r.seed = cfg.get_uint("seed", 0);
  r.threads = static_cast<unsigned>(cfg.get_uint("threads", 1));
  r.all_pairs = ov.all_pairs || cfg.get_bool("all_pairs", false);
  r.holdout_fraction = cfg.get_double("train.holdout_fraction", r.holdout_fraction);
  r.eval_method = cfg.get_string("eval.method", r.eval_method);
  if (r.eval_method != "learned" && r.eval_method != "rbf" && r.eval_method != "both")
    throw ConfigError("eval.method must be learned, rbf or both");
  r.audit_r = cfg.get_double("audit.r", r.audit_r);
  r.audit_cr = cfg.get_double("audit.cr", r.audit_cr);
  r.audit_sample = cfg.get_uint("audit.sample", r.audit_sample);

  r.arch = Architecture::from_config(cfg);
  r.train = TrainConfig::from_config(cfg);
  r.build = BuildConfig::from_config(cfg);
  r.propagation = PropagationConfig::from_config(cfg);
  if (cfg.contains("sketch.family.1.mode")) r.sketch = SketchConfig::from_config(cfg);
  r.protocol = ProtocolConfig::from_config(cfg);
  r.rbf = RbfBaselineConfig::from_config(cfg);

  // Every stochastic component draws from a named sub-seed of the root.
  r.train.seed = derive_seed(r.seed, "train");
  r.build.seed = derive_seed(r.seed, "build");
  r.build.threads = r.threads;
  if (r.sketch) r.sketch->seed = derive_seed(r.seed, "sketch");
  r.protocol.threads = r.threads;
  r.rbf.threads = r.threads;

  need(r.dataset_path, "dataset", sub);
  need(r.schema_path, "schema", sub);
  switch (sub) {
    case Subcommand::train: need(r.model_path, "model", sub); break;
    case Subcommand::build:
      need(r.model_path, "model", sub);
      need(r.graph_path, "graph", sub);
      if (!r.all_pairs && !r.sketch) throw ConfigError("'build' needs sketch.* keys or --all-pairs");
      break;
    case Subcommand::classify:
      need(r.graph_path, "graph", sub);
      need(r.output_path, "output", sub);
      break;
    case Subcommand::eval: need(r.output_path, "output", sub); break;
    case Subcommand::lsh_audit:
      need(r.model_path, "model", sub);
      need(r.output_path, "output", sub);
      if (!r.sketch) throw ConfigError("'lsh-audit' needs sketch.* keys");
      break;
  }
  return r;
}

RunConfig RunConfig::load(Subcommand sub, const std::filesystem::path& path, const Overrides& overrides) {
  const auto cfg = KeyValueConfig::load(path);
  return resolve(sub, cfg, path.parent_path(), overrides);
}

}  // namespace graphforge::cli
