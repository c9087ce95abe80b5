#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphforge/config.hpp"
#include "graphforge/dataset.hpp"
#include "graphforge/graph.hpp"
#include "graphforge/lsh.hpp"
#include "graphforge/model.hpp"
#include "graphforge/propagation.hpp"

namespace graphforge {

struct ClassificationSummary {
  std::size_t evaluated = 0;
  std::size_t correct = 0;
  std::size_t abstained = 0;
  double accuracy = 0.0;          // correct / evaluated; abstentions count as errors
  double covered_accuracy = 0.0;  // correct / (evaluated - abstained)
  double coverage = 0.0;          // (evaluated - abstained) / evaluated
};

/// Scores predictions of the nodes with `evaluate[i]` against `truth[i]`.
/// Throws when no node is evaluated.
ClassificationSummary summarize(const std::vector<LabelScores>& predictions,
                                const std::vector<std::optional<std::size_t>>& truth,
                                const std::vector<bool>& evaluate);

/// Fraction of positions where `predicted` equals `truth` (absent counts as wrong).
double accuracy(const std::vector<std::optional<std::size_t>>& predicted, const std::vector<std::size_t>& truth);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// One point per distinct score, thresholds descending; a node is predicted
/// positive when its score is >= the threshold. Throws without positives.
std::vector<PrPoint> pr_curve(std::span<const double> scores, const std::vector<bool>& truth);

/// Step-wise area under a curve from `pr_curve`: sum of precision times the
/// recall gained at each threshold.
double average_precision(const std::vector<PrPoint>& curve);

struct DegreeHistogram {
  std::size_t nodes = 0;
  std::map<std::size_t, std::size_t> degree;       // degree -> node count
  std::map<std::size_t, std::size_t> same_degree;  // same-status-neighbour degree -> node count
  double zero_fraction = 0.0;
  double positive_fraction = 0.0;
  double strong_fraction = 0.0;  // degree > 0 counting only edges with weight >= strong threshold
  double median_degree = 0.0;
  double median_same_degree = 0.0;
};

/// Per-status degree statistics. Nodes missing from `status` are grouped
/// under "unknown".
std::map<std::string, DegreeHistogram> degree_report(const Graph& graph,
                                                     const std::map<std::string, std::string>& status,
                                                     double strong_threshold = 0.9);

/// Stratified sample of `fraction` of each class's labelled points
/// (largest-remainder rounding, at least one per class). Returns a mask.
std::vector<bool> sample_visible_labels(const Dataset& dataset, double fraction, std::uint64_t seed);

struct ProtocolConfig {
  double label_fraction = 0.1;
  double holdout_fraction = 0.2;  // of the visible points, for the pair holdout
  Architecture arch;
  TrainConfig train;
  BuildConfig build;
  std::optional<SketchConfig> sketch;  // needed when all-pairs is over budget
  PropagationConfig propagation;
  bool force_sketch = false;
  bool compute_pr = false;
  bool select_by_holdout = true;  // keep the epoch with the lowest holdout-pair loss
  unsigned threads = 1;

  static ProtocolConfig from_config(const KeyValueConfig& cfg);
};

struct ExperimentReport {
  std::string method;
  ClassificationSummary summary;
  std::size_t visible = 0;
  std::size_t hidden = 0;
  std::size_t train_pairs = 0;
  std::size_t holdout_pairs = 0;
  double initial_loss = 0.0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;
  bool all_pairs = false;
  std::size_t scored_pairs = 0;
  std::size_t comparison_bound = 0;
  std::size_t edges = 0;
  std::uint64_t model_digest = 0;
  std::map<std::string, std::string> extra;
  std::vector<PrPoint> pr_points;
  std::map<std::string, DegreeHistogram> degrees;
  std::int64_t runtime_ms = 0;
};

/// Samples visible labels, trains on pairs among them, builds the graph
/// (all pairs within the pair budget, sketched otherwise) and classifies
/// every point; accuracy is over the points whose label was hidden.
ExperimentReport run_label_protocol(const Dataset& dataset, double label_fraction, std::uint64_t seed,
                                     const ProtocolConfig& config);

/// Same with an explicit visible-label mask.
ExperimentReport run_protocol_with_visible(const Dataset& dataset, const std::vector<bool>& visible,
                                           std::uint64_t seed, const ProtocolConfig& config);

struct RbfBaselineConfig {
  std::vector<std::size_t> k_grid{5, 10, 20, 40};
  /// Bandwidths as multiples of the median squared distance to the 10th
  /// nearest neighbour. +inf is allowed (all weights 1).
  std::vector<double> sigma_scale_grid{0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0};
  double holdout_fraction = 0.3;  // of the visible points, for model selection
  unsigned threads = 1;

  void validate() const;
  static RbfBaselineConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "rbf.");
};

/// Weighted k-NN graph, weight exp(-|a - b|^2 / sigma), edges kept by either
/// endpoint's k nearest. Distances run over the concatenated dense modes;
/// token modes are ignored.
Graph rbf_knn_graph(const Dataset& dataset, std::size_t k, double sigma, unsigned threads = 1);

ExperimentReport rbf_grid_baseline(const Dataset& dataset, double label_fraction, const RbfBaselineConfig& config,
                                   std::uint64_t seed);

/// key=value report text.
void write_report(std::ostream& out, const ExperimentReport& report);
/// `threshold,precision,recall` rows with a header.
void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve);
/// `status,kind,degree,count` rows with a header.
void write_degree_csv(std::ostream& out, const std::map<std::string, DegreeHistogram>& degrees);

}  // namespace graphforge
