#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "graphforge/dataset.hpp"
#include "graphforge/error.hpp"
#include "graphforge/random.hpp"

namespace graphforge::cli {

namespace {

Dataset load_input(const RunConfig& c) {
  const auto doc = load_schema(c.schema_path);
  return load_dataset(c.dataset_path, doc.schema, doc.class_count);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error("error writing " + path.string());
}

}  // namespace

int cmd_train(const RunConfig& c, std::ostream& log) {
  const Dataset data = load_input(c);
  const auto split = split_points(data, c.holdout_fraction, derive_seed(c.seed, "split"));
  for (const auto& w : split.warnings) log << "warning: " << w << '\n';

  HarvestedPairs pairs;
  if (c.all_pairs || !c.sketch) {
    const auto n = split.train.size() + split.holdout.size();
    if (n * (n - 1) / 2 > c.build.pair_budget)
      throw Error("harvesting all labelled pairs exceeds build.pair_budget; configure sketch.* keys");
    pairs = harvest_all_pairs(data, split);
  } else {
    pairs = harvest_training_pairs(data, split, nn_sketching(data, *c.sketch, c.threads));
  }
  const auto result = train(pairs.train, data, c.train, c.arch);
  save_model(c.model_path, result.model);

  KeyValueConfig report;
  report.set("train_pairs", std::to_string(pairs.train.size()));
  report.set("holdout_pairs", std::to_string(pairs.holdout.size()));
  report.set("cross_split_pairs", std::to_string(pairs.cross_split));
  report.set("undecided_pairs", std::to_string(pairs.undecided));
  report.set("epochs", std::to_string(result.epoch_losses.size()));
  report.set("initial_loss", format_exact(result.initial_loss));
  report.set("train_loss", format_exact(result.epoch_losses.back()));
  if (!pairs.holdout.empty()) report.set("holdout_loss", format_exact(log_loss(result.model, pairs.holdout, data)));
  const auto report_path = c.output_path.empty() ? std::filesystem::path(c.model_path.string() + ".report")
                                                 : c.output_path;
  auto out = open_output(report_path);
  out << report.to_text();
  finish(out, report_path);
  log << report.to_text();
  log << "model written to " << c.model_path.string() << '\n';
  return 0;
}

int cmd_build(const RunConfig& c, std::ostream& log) {
  const Dataset data = load_input(c);
  const SimilarityModel model = load_model(c.model_path);
  model.check_schema(data.schema());
  BuildStats stats;
  const Graph graph = c.all_pairs ? build_graph_all_pairs(data, model, c.build, &stats)
                                  : build_graph(data, model, *c.sketch, c.build, &stats);
  save_edges(c.graph_path, graph);
  log << "nodes=" << graph.node_count() << '\n';
  log << "edges=" << graph.edge_count() << '\n';
  log << "comparisons=" << stats.scored_pairs << '\n';
  log << "comparison_bound=" << stats.comparison_bound << '\n';
  log << "graph written to " << c.graph_path.string() << '\n';
  return 0;
}

int cmd_classify(const RunConfig& c, std::ostream& log) {
  const Dataset data = load_input(c);
  const Graph graph = load_edges(c.graph_path, node_ids_of(data));
  const auto seeds = seeds_from_dataset(graph, data);
  const auto scores = classify(graph, seeds, c.propagation, data.class_count(), c.threads);
  save_predictions(c.output_path, graph, scores);
  std::size_t abstained = 0;
  for (const auto& s : scores) abstained += s.abstained;
  log << "rule=" << to_string(c.propagation.rule) << '\n';
  log << "nodes=" << scores.size() << '\n';
  log << "abstained=" << abstained << '\n';
  log << "potts_loss=" << format_digits(potts_loss(graph, scores, seeds, data.class_count()), 9) << '\n';
  log << "predictions written to " << c.output_path.string() << '\n';
  return 0;
}

int cmd_eval(const RunConfig& c, std::ostream& log) {
  const Dataset data = load_input(c);
  const double fraction = c.protocol.label_fraction;
  std::vector<ExperimentReport> reports;
  if (c.eval_method != "rbf") {
    ProtocolConfig pc = c.protocol;
    if (c.all_pairs) pc.force_sketch = false;
    reports.push_back(run_label_protocol(data, fraction, c.seed, pc));
  }
  if (c.eval_method != "learned") reports.push_back(rbf_grid_baseline(data, fraction, c.rbf, c.seed));

  auto out = open_output(c.output_path);
  for (const auto& r : reports) {
    write_report(out, r);
    log << r.method << ": accuracy=" << format_digits(r.summary.accuracy, 6)
        << " coverage=" << format_digits(r.summary.coverage, 6) << " runtime_ms=" << r.runtime_ms << '\n';
  }
  finish(out, c.output_path);
  for (const auto& r : reports) {
    if (r.pr_points.empty()) continue;
    const auto pr_path = std::filesystem::path(c.output_path.string() + "." + r.method + ".pr.csv");
    auto pr = open_output(pr_path);
    write_pr_csv(pr, r.pr_points);
    finish(pr, pr_path);
  }
  for (const auto& r : reports) {
    if (r.degrees.empty()) continue;
    const auto path = std::filesystem::path(c.output_path.string() + "." + r.method + ".degrees.csv");
    auto deg = open_output(path);
    write_degree_csv(deg, r.degrees);
    finish(deg, path);
  }
  log << "report written to " << c.output_path.string() << '\n';
  return 0;
}

int cmd_lsh_audit(const RunConfig& c, std::ostream& log) {
  const Dataset data = load_input(c);
  const SimilarityModel model = load_model(c.model_path);
  const ModelScorer scorer(model, data, c.threads);
  const auto rep = measure_sensitivity(data, *c.sketch, scorer.as_pair_scorer(), c.audit_r, c.audit_cr,
                                       c.audit_sample, derive_seed(c.seed, "audit"), c.threads);
  KeyValueConfig kv;
  kv.set("r", format_exact(rep.r));
  kv.set("cr", format_exact(rep.cr));
  kv.set("p_hat", format_exact(rep.p_hat));
  kv.set("q_hat", format_exact(rep.q_hat));
  kv.set("baseline_p", format_exact(rep.baseline_p));
  kv.set("baseline_q", format_exact(rep.baseline_q));
  kv.set("candidate_pairs", std::to_string(rep.candidate_pairs));
  kv.set("sample_count", std::to_string(rep.sample_count));
  auto out = open_output(c.output_path);
  out << kv.to_text();
  finish(out, c.output_path);
  log << kv.to_text();
  return 0;
}

int run(const RunConfig& c, std::ostream& log) {
  switch (c.subcommand) {
    case Subcommand::train: return cmd_train(c, log);
    case Subcommand::build: return cmd_build(c, log);
    case Subcommand::classify: return cmd_classify(c, log);
    case Subcommand::eval: return cmd_eval(c, log);
    case Subcommand::lsh_audit: return cmd_lsh_audit(c, log);
  }
  return 2;
}

}  // namespace graphforge::cli
