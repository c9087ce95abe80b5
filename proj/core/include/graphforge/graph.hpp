#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphforge/config.hpp"
#include "graphforge/dataset.hpp"
#include "graphforge/lsh.hpp"
#include "graphforge/model.hpp"

namespace graphforge {

struct BuildConfig {
  double epsilon = 0.0;               // keep edges with weight > epsilon
  std::optional<std::size_t> top_k;   // per-node cap, union survival
  std::uint64_t seed = 0;
  std::size_t pair_budget = 20'000'000;  // all-pairs refuses above this many pairs
  unsigned threads = 1;

  void validate() const;
  static BuildConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "build.");
};

/// Undirected edge between node indices. `src` has the lexicographically
/// smaller id.
struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  std::uint32_t node = 0;
  double weight = 0.0;
};

/// Weighted undirected graph over a fixed node id list. Edges are stored once
/// in canonical orientation, sorted by (src id, dst id).
class Graph {
 public:
  Graph() = default;

  /// Validates ids (unique), edge endpoints, weights in (0, 1], and rejects
  /// self-loops and duplicate edges. Edges may arrive in either orientation
  /// and in any order.
  Graph(std::vector<std::string> node_ids, std::vector<Edge> edges);

  const std::vector<std::string>& node_ids() const noexcept { return ids_; }
  const std::string& id(std::size_t node) const { return ids_[node]; }
  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Incident edges of `node`, ordered by neighbor index.
  std::span<const Neighbor> neighbors(std::size_t node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }
  std::size_t degree(std::size_t node) const { return offsets_[node + 1] - offsets_[node]; }

  /// Weight of edge {a, b}, if present.
  std::optional<double> weight(std::size_t a, std::size_t b) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.ids_ == b.ids_ && a.edges_ == b.edges_; }

 private:
  std::vector<std::string> ids_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct BuildStats {
  std::size_t candidate_pairs = 0;  // before de-duplication
  std::size_t scored_pairs = 0;
  std::size_t comparison_bound = 0;  // S * N * K for sketched builds, N(N-1)/2 for all-pairs
  std::size_t buckets = 0;
};

/// Sketch, de-duplicate candidate pairs, score each once with `model`, keep
/// edges above epsilon and apply the optional per-node top-k.
Graph build_graph(const Dataset& dataset, const SimilarityModel& model, const SketchConfig& sketch,
                  const BuildConfig& build, BuildStats* stats = nullptr);

/// Scores every pair. Throws when N(N-1)/2 exceeds `build.pair_budget`.
Graph build_graph_all_pairs(const Dataset& dataset, const SimilarityModel& model, const BuildConfig& build,
                            BuildStats* stats = nullptr);

/// Shared back end: scores the given distinct pairs with `scorer`.
Graph build_from_pairs(const Dataset& dataset, std::span<const IndexPair> pairs, const PairScorer& scorer,
                       const BuildConfig& build);

/// Scores every pair of `node_count` nodes with `scorer` (no budget check).
Graph build_complete(const std::vector<std::string>& node_ids, const PairScorer& scorer, const BuildConfig& build);

/// Edge file: `src<TAB>dst<TAB>weight` sorted by (src, dst), weights with 9
/// significant digits.
void write_edges(std::ostream& out, const Graph& graph);
void save_edges(const std::filesystem::path& path, const Graph& graph);

/// Reads an edge file. Nodes are `node_ids` when given (edges naming other
/// ids are an error), otherwise the sorted set of ids the file mentions.
Graph read_edges(std::istream& in, const std::optional<std::vector<std::string>>& node_ids = std::nullopt,
                 const std::string& source = "<edges>");
Graph load_edges(const std::filesystem::path& path,
                 const std::optional<std::vector<std::string>>& node_ids = std::nullopt);

/// Node ids of a dataset in row order.
std::vector<std::string> node_ids_of(const Dataset& dataset);

}  // namespace graphforge
