#include "graphforge/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "graphforge/error.hpp"
#include "graphforge/parallel.hpp"

namespace graphforge {

void BuildConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in [0, 1)");
  if (top_k && *top_k == 0) throw ConfigError("top_k must be positive");
}

BuildConfig BuildConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  BuildConfig b;
  b.epsilon = cfg.get_double(prefix + "epsilon", b.epsilon);
  const auto k = cfg.get_int(prefix + "top_k", 0);
  if (k < 0) throw ConfigError(prefix + "top_k must be >= 0 (0 disables)");
  if (k > 0) b.top_k = static_cast<std::size_t>(k);
  b.seed = cfg.get_uint(prefix + "seed", b.seed);
  b.pair_budget = cfg.get_uint(prefix + "pair_budget", b.pair_budget);
  b.threads = static_cast<unsigned>(cfg.get_uint(prefix + "threads", b.threads));
  b.validate();
  return b;
}

// ---------------------------------------------------------------------------
// Graph

namespace {

std::vector<std::uint32_t> id_ranks(const std::vector<std::string>& ids) {
  std::vector<std::uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ids[a] < ids[b]; });
  std::vector<std::uint32_t> rank(ids.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

Graph::Graph(std::vector<std::string> node_ids, std::vector<Edge> edges) : ids_(std::move(node_ids)) {
  if (ids_.size() > std::numeric_limits<std::uint32_t>::max()) throw Error("too many nodes");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (!index_.emplace(ids_[i], i).second) throw Error("duplicate node id '" + ids_[i] + "'");
  const auto rank = id_ranks(ids_);
  for (auto& e : edges) {
    if (e.src >= ids_.size() || e.dst >= ids_.size()) throw Error("edge endpoint out of range");
    if (e.src == e.dst) throw Error("self-loop on node '" + ids_[e.src] + "'");
    if (!(e.weight > 0.0 && e.weight <= 1.0))
      throw Error("edge weight outside (0, 1] between '" + ids_[e.src] + "' and '" + ids_[e.dst] + "'");
    if (rank[e.src] > rank[e.dst]) std::swap(e.src, e.dst);
  }
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    return std::pair(rank[a.src], rank[a.dst]) < std::pair(rank[b.src], rank[b.dst]);
  });
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (edges[k].src == edges[k - 1].src && edges[k].dst == edges[k - 1].dst)
      throw Error("duplicate edge '" + ids_[edges[k].src] + "' - '" + ids_[edges[k].dst] + "'");
  edges_ = std::move(edges);

  offsets_.assign(ids_.size() + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.src + 1];
    ++offsets_[e.dst + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  auto fill = offsets_;
  for (const auto& e : edges_) {
    adjacency_[fill[e.src]++] = {e.dst, e.weight};
    adjacency_[fill[e.dst]++] = {e.src, e.weight};
  }
  for (std::size_t i = 0; i < ids_.size(); ++i)
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

std::optional<std::size_t> Graph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Graph::weight(std::size_t a, std::size_t b) const {
  const auto nb = neighbors(a);
  auto it = std::lower_bound(nb.begin(), nb.end(), b, [](const Neighbor& n, std::size_t v) { return n.node < v; });
  if (it == nb.end() || it->node != b) return std::nullopt;
  return it->weight;
}

std::vector<std::string> node_ids_of(const Dataset& dataset) {
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& p : dataset.points()) ids.push_back(p.id);
  return ids;
}

// ---------------------------------------------------------------------------
// Building

namespace {

struct Candidate {
  double weight;
  std::uint32_t other;
  std::uint32_t other_rank;
};

// Heavier first, then smaller other-id.
bool better(const Candidate& a, const Candidate& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.other_rank < b.other_rank;
}

// Bounded per-node selection of the best `k` incident candidates. The heap
// top is the worst kept candidate.
class TopK {
 public:
  TopK(std::size_t nodes, std::size_t k) : k_(k), heaps_(nodes) {}

  void offer(std::uint32_t node, const Candidate& c) {
    auto& h = heaps_[node];
    if (h.size() < k_) {
      h.push_back(c);
      std::push_heap(h.begin(), h.end(), better);
    } else if (better(c, h.front())) {
      std::pop_heap(h.begin(), h.end(), better);
      h.back() = c;
      std::push_heap(h.begin(), h.end(), better);
    }
  }

  std::vector<Candidate>& heap(std::size_t node) { return heaps_[node]; }

 private:
  std::size_t k_;
  std::vector<std::vector<Candidate>> heaps_;
};

Graph assemble(const std::vector<std::string>& ids, std::vector<Edge> edges) {
  // Union of the kept half-edges; an edge kept by both endpoints appears twice.
  for (auto& e : edges)
    if (e.src > e.dst) std::swap(e.src, e.dst);
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.src, a.dst) < std::pair(b.src, b.dst); });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.src == b.src && a.dst == b.dst; }),
              edges.end());
  return Graph(ids, std::move(edges));
}

// Merges per-worker selections and keeps each node's best k.
std::vector<Edge> select_top_k(std::vector<TopK>& parts, std::size_t nodes, std::size_t k) {
  std::vector<Edge> kept;
  std::vector<Candidate> merged;
  for (std::size_t n = 0; n < nodes; ++n) {
    merged.clear();
    for (auto& p : parts) merged.insert(merged.end(), p.heap(n).begin(), p.heap(n).end());
    const std::size_t take = std::min(k, merged.size());
    std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(take), merged.end(), better);
    for (std::size_t t = 0; t < take; ++t) kept.push_back({static_cast<std::uint32_t>(n), merged[t].other, merged[t].weight});
  }
  return kept;
}

}  // namespace

Graph build_from_pairs(const Dataset& dataset, std::span<const IndexPair> pairs, const PairScorer& scorer,
                       const BuildConfig& build) {
  build.validate();
  const auto ids = node_ids_of(dataset);
  std::vector<double> scores(pairs.size());
  parallel_for(pairs.size(), build.threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t t = b; t < e; ++t) scores[t] = scorer(pairs[t].first, pairs[t].second);
  });
  std::vector<Edge> edges;
  if (!build.top_k) {
    for (std::size_t t = 0; t < pairs.size(); ++t)
      if (scores[t] > build.epsilon) edges.push_back({pairs[t].first, pairs[t].second, scores[t]});
    return assemble(ids, std::move(edges));
  }
  const auto rank = id_ranks(ids);
  std::vector<TopK> parts;
  parts.emplace_back(ids.size(), *build.top_k);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (!(scores[t] > build.epsilon)) continue;
    const auto [i, j] = pairs[t];
    parts[0].offer(i, {scores[t], j, rank[j]});
    parts[0].offer(j, {scores[t], i, rank[i]});
  }
  return assemble(ids, select_top_k(parts, ids.size(), *build.top_k));
}

Graph build_complete(const std::vector<std::string>& ids, const PairScorer& scorer, const BuildConfig& build) {
  build.validate();
  const std::size_t n = ids.size();
  const unsigned workers = worker_count(n, build.threads);
  const auto rank = id_ranks(ids);
  std::vector<std::vector<Edge>> found(workers);
  std::vector<TopK> parts;
  if (build.top_k)
    for (unsigned w = 0; w < workers; ++w) parts.emplace_back(n, *build.top_k);
  parallel_for(n, workers, [&](std::size_t b, std::size_t e, unsigned w) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double g = scorer(i, j);
        if (!(g > build.epsilon)) continue;
        const auto a = static_cast<std::uint32_t>(i), c = static_cast<std::uint32_t>(j);
        if (build.top_k) {
          parts[w].offer(a, {g, c, rank[c]});
          parts[w].offer(c, {g, a, rank[a]});
        } else {
          found[w].push_back({a, c, g});
        }
      }
  });
  if (build.top_k) return assemble(ids, select_top_k(parts, n, *build.top_k));
  std::vector<Edge> edges;
  for (auto& f : found) edges.insert(edges.end(), f.begin(), f.end());
  return assemble(ids, std::move(edges));
}

Graph build_graph(const Dataset& dataset, const SimilarityModel& model, const SketchConfig& sketch,
                  const BuildConfig& build, BuildStats* stats) {
  build.validate();
  model.check_schema(dataset.schema());
  const auto buckets = nn_sketching(dataset, sketch, build.threads);
  std::size_t raw = 0;
  const auto pairs = candidate_pairs(buckets, &raw);
  const ModelScorer scorer(model, dataset, build.threads);
  auto graph = build_from_pairs(dataset, pairs, scorer.as_pair_scorer(), build);
  if (stats) {
    stats->buckets = buckets.size();
    stats->candidate_pairs = raw;
    stats->scored_pairs = pairs.size();
    stats->comparison_bound = comparison_bound(sketch, dataset.size());
  }
  return graph;
}

Graph build_graph_all_pairs(const Dataset& dataset, const SimilarityModel& model, const BuildConfig& build,
                            BuildStats* stats) {
  build.validate();
  model.check_schema(dataset.schema());
  const std::size_t n = dataset.size();
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  if (total > build.pair_budget)
    throw Error("all-pairs build needs " + std::to_string(total) + " scorings, above the pair budget of " +
                std::to_string(build.pair_budget));
  const ModelScorer scorer(model, dataset, build.threads);
  auto graph = build_complete(node_ids_of(dataset), scorer.as_pair_scorer(), build);
  if (stats) {
    stats->buckets = 0;
    stats->candidate_pairs = total;
    stats->scored_pairs = total;
    stats->comparison_bound = total;
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Edge files

void write_edges(std::ostream& out, const Graph& graph) {
  for (const auto& e : graph.edges())
    out << graph.id(e.src) << '\t' << graph.id(e.dst) << '\t' << format_digits(e.weight, 9) << '\n';
}

void save_edges(const std::filesystem::path& path, const Graph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write edge file: " + path.string());
  write_edges(out, graph);
  if (!out) throw Error("error writing edge file: " + path.string());
}

Graph read_edges(std::istream& in, const std::optional<std::vector<std::string>>& node_ids,
                 const std::string& source) {
  struct Row {
    std::string a, b;
    double w;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw ParseError(source, lineno, "expected 3 tab-separated fields");
    double w = 0.0;
    try {
      w = parse_double(f[2], "edge weight");
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
    rows.push_back({std::string(f[0]), std::string(f[1]), w, lineno});
  }
  std::vector<std::string> ids;
  if (node_ids) {
    ids = *node_ids;
  } else {
    std::set<std::string> seen;
    for (const auto& r : rows) {
      seen.insert(r.a);
      seen.insert(r.b);
    }
    ids.assign(seen.begin(), seen.end());
  }
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<std::uint32_t>(i));
  std::vector<Edge> edges;
  edges.reserve(rows.size());
  for (const auto& r : rows) {
    auto ia = index.find(r.a), ib = index.find(r.b);
    if (ia == index.end()) throw ParseError(source, r.line, "unknown node id '" + r.a + "'");
    if (ib == index.end()) throw ParseError(source, r.line, "unknown node id '" + r.b + "'");
    edges.push_back({ia->second, ib->second, r.w});
  }
  try {
    return Graph(std::move(ids), std::move(edges));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, 0, e.what());
  }
}

Graph load_edges(const std::filesystem::path& path, const std::optional<std::vector<std::string>>& node_ids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open edge file: " + path.string());
  return read_edges(in, node_ids, path.string());
}

}  // namespace graphforge
