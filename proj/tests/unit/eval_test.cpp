#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "graphforge/error.hpp"
#include "graphforge/eval.hpp"
#include "graphforge/synthetic.hpp"
#include "test_support.hpp"

using namespace graphforge;
using gf_test::dense_point;

namespace {

ProtocolConfig quick_protocol() {
  ProtocolConfig c;
  c.arch.tower_hidden = {8};
  c.arch.embedding_dim = 4;
  c.arch.head_hidden = {6};
  c.train.epochs = 3;
  c.build.top_k = 10;
  c.compute_pr = true;
  return c;
}

std::string report_text(const ExperimentReport& r) {
  std::ostringstream out;
  write_report(out, r);
  return out.str();
}

}  // namespace

TEST(Accuracy, PerfectAndConstantPredictors) {
  std::mt19937_64 rng(1);
  for (std::size_t classes : {2u, 3u, 5u}) {
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < 3000; ++i) truth.push_back(i % classes);
    std::shuffle(truth.begin(), truth.end(), rng);
    std::vector<std::optional<std::size_t>> perfect(truth.begin(), truth.end());
    EXPECT_EQ(accuracy(perfect, truth), 1.0);
    std::vector<std::optional<std::size_t>> constant(truth.size(), 0);
    EXPECT_NEAR(accuracy(constant, truth), 1.0 / static_cast<double>(classes), 0.05);
  }
}

TEST(Summary, AbstentionsCountAgainstHeadlineAccuracy) {
  std::vector<LabelScores> pred{{{}, 0, false}, {{}, 1, false}, {{}, std::nullopt, true}, {{}, 1, false}};
  const std::vector<std::optional<std::size_t>> truth{0, 0, 1, 1};
  const auto s = summarize(pred, truth, {true, true, true, false});
  EXPECT_EQ(s.evaluated, 3u);
  EXPECT_EQ(s.correct, 1u);
  EXPECT_EQ(s.abstained, 1u);
  EXPECT_DOUBLE_EQ(s.accuracy, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.coverage, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.covered_accuracy, 0.5);
  EXPECT_THROW(summarize(pred, truth, {false, false, false, false}), Error);
}

TEST(PrCurve, PerfectSeparationKeepsFullPrecision) {
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.2, 0.1};
  const auto curve = pr_curve(scores, {true, true, true, false, false});
  for (const auto& p : curve)
    if (p.recall < 1.0) EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(curve[2].recall, 1.0);
  EXPECT_EQ(curve[2].precision, 1.0);
  EXPECT_EQ(average_precision(curve), 1.0);
}

TEST(PrCurve, ConstantScoresGiveOnePoint) {
  const std::vector<double> scores(8, 0.4);
  const auto curve = pr_curve(scores, {true, false, false, true, false, false, false, false});
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_EQ(curve[0].precision, 0.25);
  EXPECT_EQ(curve[0].recall, 1.0);
  EXPECT_EQ(curve[0].threshold, 0.4);
}

TEST(PrCurve, RandomScoresAverageOneHalf) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores;
  std::vector<bool> truth;
  for (int i = 0; i < 10000; ++i) {
    scores.push_back(u(rng));
    truth.push_back(i % 2 == 0);
  }
  const auto curve = pr_curve(scores, truth);
  EXPECT_NEAR(average_precision(curve), 0.5, 0.03);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    EXPECT_GE(curve[k].recall, curve[k - 1].recall);
    EXPECT_LT(curve[k].threshold, curve[k - 1].threshold);
  }
  for (const auto& p : curve) {
    EXPECT_GE(p.precision, 0.0);
    EXPECT_LE(p.precision, 1.0);
  }
}

TEST(PrCurve, NeedsAPositive) {
  const std::vector<double> scores{0.1, 0.2};
  EXPECT_THROW(pr_curve(scores, {false, false}), Error);
}

TEST(Degrees, EmptyGraphLeavesEveryNodeAtZero) {
  const Graph g({"a", "b", "c"}, {});
  const auto r = degree_report(g, {{"a", "pos"}, {"b", "neg"}});
  EXPECT_EQ(r.at("pos").zero_fraction, 1.0);
  EXPECT_EQ(r.at("neg").zero_fraction, 1.0);
  EXPECT_EQ(r.at("unknown").nodes, 1u);
  EXPECT_EQ(r.at("unknown").degree.at(0), 1u);
}

TEST(Degrees, TriangleOfOneStatus) {
  const Graph g({"a", "b", "c"}, {{0, 1, 0.95}, {1, 2, 0.5}, {0, 2, 0.5}});
  const auto r = degree_report(g, {{"a", "s"}, {"b", "s"}, {"c", "s"}});
  const auto& h = r.at("s");
  EXPECT_EQ(h.degree.at(2), 3u);
  EXPECT_EQ(h.same_degree.at(2), 3u);
  EXPECT_EQ(h.positive_fraction, 1.0);
  EXPECT_DOUBLE_EQ(h.strong_fraction, 2.0 / 3.0);  // c has no edge above 0.9
  EXPECT_EQ(h.median_degree, 2.0);
}

TEST(Degrees, PlantedPositivesHaveMorePositiveNeighbours) {
  synthetic::PlantedConfig pc;
  pc.nodes = 300;
  pc.community_shares = {0.2, 0.8};
  pc.p_in = 0.1;
  pc.p_out = 0.02;
  pc.seed = 8;
  const auto planted = synthetic::make_planted(pc);
  std::map<std::string, std::string> status;
  for (std::size_t i = 0; i < pc.nodes; ++i) status[planted.graph.id(i)] = planted.community[i] == 0 ? "pos" : "neg";
  const auto r = degree_report(planted.graph, status);
  // Count, for each node, its neighbours of status "pos".
  std::vector<std::size_t> pos_nb_pos, pos_nb_neg;
  for (std::size_t i = 0; i < pc.nodes; ++i) {
    std::size_t k = 0;
    for (const auto& nb : planted.graph.neighbors(i)) k += planted.community[nb.node] == 0;
    (planted.community[i] == 0 ? pos_nb_pos : pos_nb_neg).push_back(k);
  }
  auto median = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? double(v[v.size() / 2]) : 0.5 * double(v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  EXPECT_GT(median(pos_nb_pos), median(pos_nb_neg));
  EXPECT_EQ(r.at("pos").median_same_degree, median(pos_nb_pos));
}

TEST(VisibleLabels, StratifiedAndSeeded) {
  const auto d = synthetic::make_blobs(4, 50, 3, 2.0, 1.0, 1);
  const auto a = sample_visible_labels(d, 0.1, 5);
  EXPECT_EQ(a, sample_visible_labels(d, 0.1, 5));
  EXPECT_NE(a, sample_visible_labels(d, 0.1, 6));
  std::vector<std::size_t> per_class(4);
  for (std::size_t i = 0; i < d.size(); ++i) per_class[*d[i].label] += a[i];
  EXPECT_EQ(per_class, (std::vector<std::size_t>{5, 5, 5, 5}));
  EXPECT_THROW(sample_visible_labels(d, 0.0, 1), ConfigError);
  EXPECT_THROW(sample_visible_labels(d, 1.5, 1), ConfigError);
}

TEST(Protocol, FullLabelFractionHasNothingToEvaluate) {
  const auto d = synthetic::make_blobs(2, 30, 3, 3.0, 1.0, 2);
  EXPECT_THROW(run_label_protocol(d, 1.0, 1, quick_protocol()), Error);
}

TEST(Protocol, SameSeedGivesIdenticalReport) {
  const auto d = synthetic::make_blobs(3, 60, 4, 3.0, 1.0, 3);
  const auto a = run_label_protocol(d, 0.2, 7, quick_protocol());
  const auto b = run_label_protocol(d, 0.2, 7, quick_protocol());
  EXPECT_EQ(report_text(a), report_text(b));
  EXPECT_TRUE(a.all_pairs);
  EXPECT_EQ(a.hidden + a.visible, d.size());
  EXPECT_GT(a.summary.accuracy, 0.5);  // three classes, chance is 1/3
  EXPECT_FALSE(a.pr_points.empty());
  EXPECT_EQ(a.degrees.count("seed"), 1u);
  EXPECT_NE(report_text(a), report_text(run_label_protocol(d, 0.2, 8, quick_protocol())));
}

TEST(Protocol, HiddenLabelsNeverReachTheModel) {
  const auto d = synthetic::make_blobs(3, 50, 4, 3.0, 1.0, 4);
  const auto visible = sample_visible_labels(d, 0.2, 1);
  // Same points, hidden labels scrambled.
  std::vector<Point> pts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    pts.push_back(d[i]);
    if (!visible[i]) pts.back().label = (*d[i].label + 1 + i % 2) % 3;
  }
  const Dataset scrambled(d.schema(), std::move(pts), 3);
  const auto a = run_protocol_with_visible(d, visible, 9, quick_protocol());
  const auto b = run_protocol_with_visible(scrambled, visible, 9, quick_protocol());
  EXPECT_EQ(a.model_digest, b.model_digest);
  EXPECT_EQ(a.train_pairs, b.train_pairs);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.holdout_loss, b.holdout_loss);
  // Only the score against the truth may move.
  EXPECT_NE(a.summary.correct, b.summary.correct);
}

TEST(Protocol, SketchedBuildRespectsBound) {
  synthetic::ClusteredConfig sc;
  sc.clusters = 4;
  sc.points_per_cluster = 40;
  const auto d = synthetic::make_clustered(sc);
  auto c = quick_protocol();
  c.force_sketch = true;
  // The one-bit hyperplane family mixes clusters so both pair labels occur.
  SketchConfig sk;
  sk.families = {{"tags", HashFamily::minhash, 4.0, 1}, {"vec", HashFamily::random_hyperplane, 4.0, 1}};
  sk.composition = Composition::or_modes;
  sk.num_functions = 6;
  sk.bucket_cap = 30;
  c.sketch = sk;
  const auto r = run_label_protocol(d, 0.25, 2, c);
  EXPECT_FALSE(r.all_pairs);
  EXPECT_GT(r.scored_pairs, 0u);
  EXPECT_LE(r.scored_pairs, r.comparison_bound);
  EXPECT_EQ(r.comparison_bound, 6u * d.size() * 30u);
  c.sketch.reset();
  EXPECT_THROW(run_label_protocol(d, 0.25, 2, c), ConfigError);
}

TEST(Rbf, InfiniteBandwidthGivesUnitWeights) {
  const auto d = synthetic::make_blobs(2, 20, 3, 2.0, 1.0, 5);
  const auto g = rbf_knn_graph(d, 5, std::numeric_limits<double>::infinity());
  ASSERT_GT(g.edge_count(), 0u);
  for (const auto& e : g.edges()) EXPECT_EQ(e.weight, 1.0);
  for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_GE(g.degree(i), 5u);
}

TEST(Rbf, DuplicatePointsGetWeightOne) {
  std::vector<Point> pts{dense_point("a", {1, 2}, 0), dense_point("b", {1, 2}, 0), dense_point("c", {5, 5}, 1),
                         dense_point("d", {6, 5}, 1)};
  const Dataset d(gf_test::dense_schema(2), std::move(pts), 2);
  const auto g = rbf_knn_graph(d, 1, 0.5);
  EXPECT_EQ(g.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(*g.weight(2, 3), std::exp(-1.0 / 0.5));
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(Rbf, KnnGraphMatchesBruteForce) {
  const auto d = gf_test::random_dense(80, 3, 3);
  const std::size_t k = 4;
  const double sigma = 2.0;
  const auto g = rbf_knn_graph(d, k, sigma, 2);
  std::set<std::pair<std::size_t, std::size_t>> oracle;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> byd;
    for (std::size_t j = 0; j < d.size(); ++j)
      if (j != i) byd.emplace_back(squared_euclidean(d.dense_input(i), d.dense_input(j)), j);
    std::sort(byd.begin(), byd.end());
    for (std::size_t t = 0; t < k; ++t) oracle.emplace(std::min(i, byd[t].second), std::max(i, byd[t].second));
  }
  ASSERT_EQ(g.edge_count(), oracle.size());
  for (auto [i, j] : oracle) {
    const auto w = g.weight(i, j);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(*w, std::exp(-squared_euclidean(d.dense_input(i), d.dense_input(j)) / sigma), 1e-12);
  }
}

TEST(Rbf, GridBaselineSeparatesBlobs) {
  const auto d = synthetic::make_blobs(3, 80, 4, 4.0, 1.0, 6);
  RbfBaselineConfig c;
  c.k_grid = {5, 10};
  c.sigma_scale_grid = {0.5, 1.0, 2.0};
  const auto r = rbf_grid_baseline(d, 0.2, c, 3);
  // Sparse k-NN graphs leave some nodes without a seed neighbour; those
  // abstain, so the headline accuracy sits below the covered accuracy.
  EXPECT_GT(r.summary.covered_accuracy, 0.95);
  EXPECT_GT(r.summary.accuracy, 0.6);
  EXPECT_EQ(r.extra.at("grid_points"), "6");
  EXPECT_EQ(report_text(r), report_text(rbf_grid_baseline(d, 0.2, c, 3)));
  c.k_grid.clear();
  EXPECT_THROW(rbf_grid_baseline(d, 0.2, c, 3), ConfigError);
}

TEST(Report, WritersEmitHeaders) {
  std::ostringstream pr, deg;
  write_pr_csv(pr, {{0.5, 1.0, 0.25}});
  EXPECT_EQ(pr.str(), "threshold,precision,recall\n0.5,1,0.25\n");
  const Graph g({"a", "b"}, {{0, 1, 0.5}});
  write_degree_csv(deg, degree_report(g, {{"a", "s"}, {"b", "s"}}));
  EXPECT_EQ(deg.str().substr(0, deg.str().find('\n')), "status,kind,degree,count");
  EXPECT_NE(deg.str().find("s,total,1,2"), std::string::npos);
}
