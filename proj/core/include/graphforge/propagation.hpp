#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphforge/config.hpp"
#include "graphforge/dataset.hpp"
#include "graphforge/graph.hpp"

namespace graphforge {

enum class Rule { product_one_shot, iterative, max_edge };

std::string_view to_string(Rule rule);
Rule parse_rule(std::string_view name);

struct PropagationConfig {
  double alpha = 0.5;  // weight of the node's own anchor
  double beta = 0.5;   // weight of the neighborhood average
  std::size_t iterations = 10;
  Rule rule = Rule::product_one_shot;

  void validate() const;
  static PropagationConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "propagation.");
};

/// Known class per graph node (absent for unlabeled nodes).
using SeedLabels = std::vector<std::optional<std::size_t>>;

/// Seeds taken from the labels of dataset points whose ids are graph nodes.
SeedLabels seeds_from_dataset(const Graph& graph, const Dataset& dataset);
SeedLabels seeds_from_map(const Graph& graph, const std::map<std::string, std::size_t>& labels);

struct LabelScores {
  std::vector<double> scores;  // one per class
  std::optional<std::size_t> predicted;
  bool abstained = true;
};

/// score(i, c) = product of edge weights from i to labelled neighbours of
/// class c (0 when there are none). The prediction is the argmax over the
/// classes that have a labelled neighbour, compared in log space so long
/// products do not underflow. Nodes without labelled neighbours abstain.
std::vector<LabelScores> classify_one_shot(const Graph& graph, const SeedLabels& seeds, std::size_t class_count,
                                           unsigned threads = 1);

/// Largest weight of an edge from each node to any seed; 0 without one.
std::vector<double> classify_max_edge(const Graph& graph, const std::vector<bool>& seeds, unsigned threads = 1);

/// Per-class max-edge scores: score(i, c) is the heaviest edge from i to a
/// class-c seed. Predicts the argmax, abstains without a seed neighbour.
std::vector<LabelScores> classify_max_edge(const Graph& graph, const SeedLabels& seeds, std::size_t class_count,
                                           unsigned threads = 1);

/// Synchronous rounds of
///   seeds:     y <- alpha * onehot + beta * avg
///   others:    y <- alpha * y_prev + beta * avg
/// where avg is the edge-weighted mean of the neighbours' previous scores.
/// Unlabelled nodes start uniform. A node with no incident weight keeps its
/// previous scores. Nodes whose final scores are all equal abstain.
std::vector<LabelScores> propagate_iterative(const Graph& graph, const SeedLabels& seeds,
                                             const PropagationConfig& config, std::size_t class_count,
                                             unsigned threads = 1);

/// Dispatches on `config.rule`.
std::vector<LabelScores> classify(const Graph& graph, const SeedLabels& seeds, const PropagationConfig& config,
                                  std::size_t class_count, unsigned threads = 1);

/// Smoothness over edges plus fit to seeds, L1 in class scores. Abstaining
/// nodes count as uniform.
double potts_loss(const Graph& graph, const std::vector<LabelScores>& scores, const SeedLabels& seeds,
                  std::size_t class_count);

/// `node_id<TAB>class|ABSTAIN<TAB>s0,s1,...` per node in graph order.
void write_predictions(std::ostream& out, const Graph& graph, const std::vector<LabelScores>& scores);
void save_predictions(const std::filesystem::path& path, const Graph& graph, const std::vector<LabelScores>& scores);

}  // namespace graphforge
