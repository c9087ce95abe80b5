#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "graphforge/error.hpp"
#include "graphforge/graph.hpp"
#include "graphforge/random.hpp"
#include "graphforge/synthetic.hpp"
#include "test_support.hpp"

using namespace graphforge;
using gf_test::dense_point;

namespace {

using EdgeKey = std::pair<std::string, std::string>;

std::set<EdgeKey> edge_keys(const Graph& g) {
  std::set<EdgeKey> out;
  for (const auto& e : g.edges()) out.emplace(g.id(e.src), g.id(e.dst));
  return out;
}

std::string edge_text(const Graph& g) {
  std::ostringstream out;
  write_edges(out, g);
  return out.str();
}

Architecture small_arch() {
  Architecture a;
  a.tower_hidden = {8};
  a.embedding_dim = 4;
  a.head_hidden = {6};
  return a;
}

// Deterministic pseudo-random symmetric score in (0, 1).
double hashed_score(std::size_t i, std::size_t j) {
  const auto lo = std::min(i, j), hi = std::max(i, j);
  const auto h = mix64(lo * 1000003u + hi);
  return 0.01 + 0.98 * static_cast<double>(h % 100000) / 100000.0;
}

struct TrainedClusters {
  Dataset data;
  SimilarityModel model;
  SketchConfig sketch;
};

// 500 two-mode clustered points and a model trained on a labelled split.
const TrainedClusters& trained_clusters() {
  static const TrainedClusters t = [] {
    synthetic::ClusteredConfig sc;
    sc.clusters = 10;
    sc.points_per_cluster = 50;
    sc.dense_dim = 8;
    sc.seed = 21;
    auto d = synthetic::make_clustered(sc);
    const auto split = split_points(d, 0.2, 3);
    const auto pairs = harvest_all_pairs(d, split);
    TrainConfig tc;
    tc.epochs = 4;
    tc.seed = 5;
    auto model = train(pairs.train, d, tc, small_arch()).model;
    SketchConfig sk;
    sk.families = {{"tags", HashFamily::minhash, 4.0, 1}};
    sk.num_functions = 8;
    sk.seed = 9;
    return TrainedClusters{std::move(d), std::move(model), sk};
  }();
  return t;
}

}  // namespace

TEST(GraphType, CanonicalizesAndIndexes) {
  const Graph g({"c", "a", "b"}, {{0, 1, 0.5}, {2, 0, 0.25}});
  ASSERT_EQ(g.edge_count(), 2u);
  // Edges run from the smaller id and are sorted by (src id, dst id).
  EXPECT_EQ(g.id(g.edges()[0].src), "a");
  EXPECT_EQ(g.id(g.edges()[0].dst), "c");
  EXPECT_EQ(g.id(g.edges()[1].src), "b");
  EXPECT_EQ(g.weight(0, 2), 0.25);
  EXPECT_EQ(g.weight(2, 0), 0.25);
  EXPECT_FALSE(g.weight(1, 2).has_value());
  EXPECT_EQ(g.degree(0), 2u);
  EXPECT_EQ(g.index_of("b"), 2u);
  EXPECT_FALSE(g.index_of("z").has_value());
}

TEST(GraphType, RejectsMalformedEdges) {
  const std::vector<std::string> ids{"a", "b", "c"};
  EXPECT_THROW(Graph(ids, {{0, 0, 0.5}}), Error);
  EXPECT_THROW(Graph(ids, {{0, 1, 0.5}, {1, 0, 0.4}}), Error);
  EXPECT_THROW(Graph(ids, {{0, 3, 0.5}}), Error);
  EXPECT_THROW(Graph(ids, {{0, 1, 0.0}}), Error);
  EXPECT_THROW(Graph(ids, {{0, 1, 1.5}}), Error);
  EXPECT_THROW(Graph({"a", "a"}, {}), Error);
}

TEST(BuildGraph, UntrainedModelAtHighEpsilonGivesEmptyGraph) {
  const auto d = gf_test::random_dense(100, 3, 2);
  auto model = SimilarityModel::initialize(d.schema(), small_arch(), 1);
  BuildConfig b;
  b.epsilon = 0.999999;
  SketchConfig sk;
  sk.families = {{"x", HashFamily::random_hyperplane, 4.0, 2}};
  EXPECT_EQ(build_graph(d, model, sk, b).edge_count(), 0u);
  EXPECT_EQ(build_graph_all_pairs(d, model, b).edge_count(), 0u);
}

TEST(BuildGraph, DuplicatePointsShareOneEdge) {
  const auto& t = trained_clusters();
  std::vector<Point> pts;
  for (std::size_t i = 0; i < t.data.size(); ++i) pts.push_back(t.data[i]);
  pts.push_back(t.data[0]);
  pts.back().id = "dup";
  const Dataset d(t.data.schema(), std::move(pts), t.data.class_count());
  BuildConfig b;
  b.epsilon = 0.5;
  auto sk = t.sketch;
  sk.num_functions = 4;
  const auto g = build_graph(d, t.model, sk, b);
  const auto w = g.weight(0, d.size() - 1);
  ASSERT_TRUE(w.has_value());
  EXPECT_GT(*w, 0.5);
  std::size_t between = 0;
  for (const auto& e : g.edges()) between += (g.id(e.src) == "dup" || g.id(e.dst) == "dup") && (e.src == 0 || e.dst == 0);
  EXPECT_EQ(between, 1u);
}

TEST(BuildGraph, ThreeNodesAboveEpsilonFormTriangle) {
  std::vector<Point> pts{dense_point("a", {0}), dense_point("b", {0.1}), dense_point("c", {0.2})};
  const Dataset d(gf_test::dense_schema(1), std::move(pts), 1);
  auto model = SimilarityModel::initialize(d.schema(), Architecture{}, 1);
  model.head().back().bias[0] = 5.0;  // all scores well above one half
  BuildConfig b;
  b.epsilon = 0.5;
  BuildStats stats;
  const auto g = build_graph_all_pairs(d, model, b, &stats);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(stats.scored_pairs, 3u);
}

TEST(BuildGraph, AllPairsRefusesOverBudget) {
  const auto d = gf_test::random_dense(1000, 2, 1);
  const auto model = SimilarityModel::initialize(d.schema(), Architecture{}, 1);
  BuildConfig b;
  b.pair_budget = 1000;
  EXPECT_THROW(build_graph_all_pairs(d, model, b), Error);
}

TEST(BuildGraph, SketchedEdgesAreSubsetOfAllPairs) {
  const auto& t = trained_clusters();
  BuildConfig b;
  b.epsilon = 0.3;
  BuildStats stats;
  const auto lsh = build_graph(t.data, t.model, t.sketch, b, &stats);
  const auto full = build_graph_all_pairs(t.data, t.model, b);
  const auto lsh_edges = edge_keys(lsh);
  const auto full_edges = edge_keys(full);
  EXPECT_FALSE(lsh_edges.empty());
  for (const auto& e : lsh_edges) EXPECT_TRUE(full_edges.count(e)) << e.first << " " << e.second;
  for (const auto& e : lsh.edges()) EXPECT_EQ(e.weight, full.weight(e.src, e.dst));
  EXPECT_LE(stats.scored_pairs, stats.candidate_pairs);
  EXPECT_LE(stats.scored_pairs, stats.comparison_bound);
  EXPECT_EQ(stats.comparison_bound, comparison_bound(t.sketch, t.data.size()));
}

TEST(BuildGraph, SketchRecoversMostTopTenEdges) {
  const auto& t = trained_clusters();
  BuildConfig top10;
  top10.top_k = 10;
  const auto oracle = edge_keys(build_graph_all_pairs(t.data, t.model, top10));
  BuildStats stats;
  const auto lsh = edge_keys(build_graph(t.data, t.model, t.sketch, BuildConfig{}, &stats));
  std::size_t found = 0;
  for (const auto& e : oracle) found += lsh.count(e);
  const double n = static_cast<double>(t.data.size());
  EXPECT_GE(static_cast<double>(found), 0.9 * static_cast<double>(oracle.size()));
  EXPECT_LT(static_cast<double>(stats.scored_pairs), 0.25 * n * (n - 1) / 2);
}

TEST(BuildGraph, EdgesAreUndirected) {
  const auto& t = trained_clusters();
  BuildConfig b;
  b.epsilon = 0.2;
  const auto g = build_graph(t.data, t.model, t.sketch, b);
  const auto& schema = t.data.schema();
  for (const auto& e : g.edges()) {
    EXPECT_EQ(e.weight, predict(t.model, t.data[e.dst], t.data[e.src], schema));
    EXPECT_LT(g.id(e.src), g.id(e.dst));
  }
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (const auto& nb : g.neighbors(i)) EXPECT_EQ(g.weight(nb.node, i), nb.weight);
}

TEST(BuildGraph, HigherEpsilonKeepsSubset) {
  const auto& t = trained_clusters();
  std::set<EdgeKey> previous;
  bool first = true;
  for (double eps : {0.05, 0.3, 0.6, 0.9}) {
    BuildConfig b;
    b.epsilon = eps;
    const auto g = build_graph(t.data, t.model, t.sketch, b);
    for (const auto& e : g.edges()) EXPECT_GT(e.weight, eps);
    const auto cur = edge_keys(g);
    if (!first)
      for (const auto& e : cur) EXPECT_TRUE(previous.count(e));
    previous = cur;
    first = false;
  }
}

TEST(BuildGraph, IdenticalAcrossThreadCounts) {
  const auto& t = trained_clusters();
  BuildConfig b;
  b.epsilon = 0.1;
  b.top_k = 7;
  const auto one = edge_text(build_graph(t.data, t.model, t.sketch, b));
  b.threads = 3;
  EXPECT_EQ(one, edge_text(build_graph(t.data, t.model, t.sketch, b)));
  b.threads = 1;
  const auto full_one = edge_text(build_graph_all_pairs(t.data, t.model, b));
  b.threads = 4;
  EXPECT_EQ(full_one, edge_text(build_graph_all_pairs(t.data, t.model, b)));
}

TEST(TopK, EdgeSurvivesWhenEitherEndpointKeepsIt) {
  const std::vector<std::string> ids{"a", "b", "c", "d", "e"};
  // Hub "a" ranks b, c above d, e. Leaves keep their only edge.
  const std::map<std::pair<std::size_t, std::size_t>, double> w{
      {{0, 1}, 0.9}, {{0, 2}, 0.8}, {{0, 3}, 0.3}, {{0, 4}, 0.2}, {{3, 4}, 0.6}};
  const PairScorer scorer = [&](std::size_t i, std::size_t j) {
    auto it = w.find({std::min(i, j), std::max(i, j)});
    return it == w.end() ? 0.01 : it->second;
  };
  BuildConfig b;
  b.epsilon = 0.1;
  b.top_k = 1;
  const auto g = build_complete(ids, scorer, b);
  // a keeps b; c keeps a; d keeps e; e keeps d. (a, d) and (a, e) survive nowhere.
  EXPECT_EQ(edge_keys(g), (std::set<EdgeKey>{{"a", "b"}, {"a", "c"}, {"d", "e"}}));
}

TEST(TopK, MatchesBruteForceOracle) {
  std::vector<std::string> ids;
  for (int i = 0; i < 60; ++i) ids.push_back("n" + std::to_string(100 + i));
  BuildConfig b;
  b.epsilon = 0.2;
  b.top_k = 4;
  const auto g = build_complete(ids, hashed_score, b);
  std::set<EdgeKey> oracle;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (j != i && hashed_score(i, j) > b.epsilon) ranked.emplace_back(-hashed_score(i, j), j);
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t r = 0; r < std::min<std::size_t>(4, ranked.size()); ++r) {
      const auto j = ranked[r].second;
      oracle.emplace(std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
    }
  }
  EXPECT_EQ(edge_keys(g), oracle);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_GE(g.degree(i), 4u);
}

TEST(BuildConfigKeys, ParsesAndValidates) {
  const auto b = BuildConfig::from_config(
      KeyValueConfig::parse("build.epsilon = 0.25\nbuild.top_k = 12\nbuild.pair_budget = 500\n"));
  EXPECT_EQ(b.epsilon, 0.25);
  EXPECT_EQ(b.top_k, 12u);
  EXPECT_EQ(b.pair_budget, 500u);
  EXPECT_FALSE(BuildConfig::from_config(KeyValueConfig::parse("build.top_k = 0\n")).top_k.has_value());
  EXPECT_THROW(BuildConfig::from_config(KeyValueConfig::parse("build.epsilon = 1\n")), ConfigError);
}

TEST(EdgeFile, RoundTripsWithNineDigits) {
  const Graph g({"x", "a", "m"}, {{0, 1, 0.123456789123}, {2, 1, 1.0 / 3.0}});
  const auto text = edge_text(g);
  EXPECT_EQ(text, "a\tm\t0.333333333\na\tx\t0.123456789\n");
  gf_test::TempDir dir("edges");
  save_edges(dir / "g.tsv", g);
  const auto back = load_edges(dir / "g.tsv");
  EXPECT_EQ(back.node_ids(), (std::vector<std::string>{"a", "m", "x"}));
  EXPECT_EQ(edge_text(back), text);
  const auto with_ids = load_edges(dir / "g.tsv", std::vector<std::string>{"x", "a", "m", "lonely"});
  EXPECT_EQ(with_ids.node_count(), 4u);
  EXPECT_EQ(with_ids.degree(3), 0u);
  EXPECT_THROW(load_edges(dir / "g.tsv", std::vector<std::string>{"a", "m"}), Error);
  std::istringstream bad("a\tb\n");
  EXPECT_THROW(read_edges(bad), ParseError);
}
