#include "graphforge/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "graphforge/error.hpp"
#include "graphforge/metrics.hpp"
#include "graphforge/parallel.hpp"
#include "graphforge/random.hpp"

namespace graphforge {

// ---------------------------------------------------------------------------
// Accuracy

ClassificationSummary summarize(const std::vector<LabelScores>& predictions,
                                const std::vector<std::optional<std::size_t>>& truth,
                                const std::vector<bool>& evaluate) {
  if (predictions.size() != truth.size() || evaluate.size() != truth.size())
    throw Error("prediction, truth and mask sizes differ");
  ClassificationSummary s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!evaluate[i]) continue;
    if (!truth[i]) throw Error("evaluated node without a true label");
    ++s.evaluated;
    const auto& p = predictions[i];
    if (p.abstained || !p.predicted)
      ++s.abstained;
    else if (*p.predicted == *truth[i])
      ++s.correct;
  }
  if (s.evaluated == 0) throw Error("no nodes to evaluate (every labelled point is visible)");
  const auto covered = s.evaluated - s.abstained;
  s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.evaluated);
  s.coverage = static_cast<double>(covered) / static_cast<double>(s.evaluated);
  s.covered_accuracy = covered ? static_cast<double>(s.correct) / static_cast<double>(covered) : 0.0;
  return s;
}

double accuracy(const std::vector<std::optional<std::size_t>>& predicted, const std::vector<std::size_t>& truth) {
  if (predicted.size() != truth.size()) throw Error("prediction and truth sizes differ");
  if (truth.empty()) throw Error("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] && *predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// Precision / recall

std::vector<PrPoint> pr_curve(std::span<const double> scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) throw Error("score and truth sizes differ");
  const auto positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), true));
  if (positives == 0) throw Error("precision/recall needs at least one positive");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::vector<PrPoint> curve;
  std::size_t tp = 0, taken = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = scores[order[k]];
    while (k < order.size() && scores[order[k]] == t) {
      tp += truth[order[k]];
      ++taken;
      ++k;
    }
    curve.push_back({t, static_cast<double>(tp) / static_cast<double>(taken),
                     static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return curve;
}

double average_precision(const std::vector<PrPoint>& curve) {
  double ap = 0.0, prev_recall = 0.0;
  for (const auto& p : curve) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

// ---------------------------------------------------------------------------
// Degrees

namespace {

double median_of(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  if (v.size() % 2) return static_cast<double>(v[m]);
  return 0.5 * static_cast<double>(v[m - 1] + v[m]);
}

}  // namespace

std::map<std::string, DegreeHistogram> degree_report(const Graph& graph,
                                                     const std::map<std::string, std::string>& status,
                                                     double strong_threshold) {
  std::vector<std::string> node_status(graph.node_count(), "unknown");
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    if (auto it = status.find(graph.id(i)); it != status.end()) node_status[i] = it->second;

  std::map<std::string, DegreeHistogram> out;
  std::map<std::string, std::vector<std::size_t>> degrees, same_degrees;
  std::map<std::string, std::size_t> zero, positive, strong;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& s = node_status[i];
    std::size_t same = 0, heavy = 0;
    for (const auto& nb : graph.neighbors(i)) {
      same += node_status[nb.node] == s;
      heavy += nb.weight >= strong_threshold;
    }
    const auto deg = graph.degree(i);
    auto& h = out[s];
    ++h.nodes;
    ++h.degree[deg];
    ++h.same_degree[same];
    degrees[s].push_back(deg);
    same_degrees[s].push_back(same);
    zero[s] += deg == 0;
    positive[s] += deg > 0;
    strong[s] += heavy > 0;
  }
  for (auto& [s, h] : out) {
    const auto n = static_cast<double>(h.nodes);
    h.zero_fraction = static_cast<double>(zero[s]) / n;
    h.positive_fraction = static_cast<double>(positive[s]) / n;
    h.strong_fraction = static_cast<double>(strong[s]) / n;
    h.median_degree = median_of(degrees[s]);
    h.median_same_degree = median_of(same_degrees[s]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Visible-label sampling

std::vector<bool> sample_visible_labels(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("label fraction must be in (0, 1]");
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset[i].label) by_class[*dataset[i].label].push_back(i);
  if (by_class.empty()) throw Error("dataset has no labelled points");

  std::size_t labeled = 0;
  for (const auto& [c, m] : by_class) labeled += m.size();
  const auto target = std::max<std::size_t>(
      by_class.size(), static_cast<std::size_t>(std::llround(fraction * static_cast<double>(labeled))));

  std::vector<std::size_t> classes;
  std::vector<std::size_t> quota;
  std::vector<double> remainder;
  std::size_t assigned = 0;
  for (const auto& [c, m] : by_class) {
    const double exact = fraction * static_cast<double>(m.size());
    const auto q = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact)), 1, m.size());
    classes.push_back(c);
    quota.push_back(q);
    remainder.push_back(exact - static_cast<double>(q));
    assigned += q;
  }
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (bool moved = true; assigned < target && moved;) {
    moved = false;
    for (auto k : order) {
      if (assigned == target) break;
      if (quota[k] < by_class[classes[k]].size()) {
        ++quota[k];
        ++assigned;
        moved = true;
      }
    }
  }

  Rng rng = make_rng(seed, "visible_labels");
  std::vector<bool> visible(dataset.size(), false);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    auto members = by_class[classes[k]];
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r = 0; r < quota[k]; ++r) visible[members[r]] = true;
  }
  return visible;
}

// ---------------------------------------------------------------------------
// Labelling protocol

ProtocolConfig ProtocolConfig::from_config(const KeyValueConfig& cfg) {
  ProtocolConfig p;
  p.label_fraction = cfg.get_double("protocol.label_fraction", p.label_fraction);
  p.holdout_fraction = cfg.get_double("protocol.holdout_fraction", p.holdout_fraction);
  p.force_sketch = cfg.get_bool("protocol.force_sketch", p.force_sketch);
  p.compute_pr = cfg.get_bool("protocol.compute_pr", p.compute_pr);
  p.select_by_holdout = cfg.get_bool("protocol.select_by_holdout", p.select_by_holdout);
  p.arch = Architecture::from_config(cfg);
  p.train = TrainConfig::from_config(cfg);
  p.build = BuildConfig::from_config(cfg);
  if (cfg.contains("sketch.family.1.mode")) p.sketch = SketchConfig::from_config(cfg);
  p.propagation = PropagationConfig::from_config(cfg);
  return p;
}

namespace {

std::uint64_t model_digest(const SimilarityModel& model) {
  std::ostringstream s;
  write_model(s, model);
  return fnv1a(s.str());
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ExperimentReport run_protocol_with_visible(const Dataset& dataset, const std::vector<bool>& visible,
                                           std::uint64_t seed, const ProtocolConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (visible.size() != dataset.size()) throw Error("visible mask does not match the dataset");
  if (dataset.class_count() < 2) throw Error("the protocol needs at least two classes");

  ExperimentReport report;
  report.method = "learned";
  const Dataset masked = mask_labels(dataset, visible);
  report.visible = masked.labeled_count();

  // Pairs among visible points only; hidden labels never reach the model.
  const auto split = split_points(masked, config.holdout_fraction, derive_seed(seed, "pair_split"));
  const std::size_t split_points_total = split.train.size() + split.holdout.size();
  const std::size_t harvest_pairs = split_points_total * (split_points_total - 1) / 2;
  HarvestedPairs pairs;
  if (harvest_pairs <= config.build.pair_budget && !config.force_sketch) {
    pairs = harvest_all_pairs(masked, split);
  } else {
    if (!config.sketch) throw ConfigError("visible pair count exceeds the pair budget and no sketch is configured");
    SketchConfig sk = *config.sketch;
    sk.seed = derive_seed(seed, "harvest_sketch");
    pairs = harvest_training_pairs(masked, split, nn_sketching(masked, sk, config.threads));
  }
  report.train_pairs = pairs.train.size();
  report.holdout_pairs = pairs.holdout.size();

  TrainConfig tc = config.train;
  tc.seed = derive_seed(seed, "train");
  auto trained = train(pairs.train, masked, tc, config.arch,
                       config.select_by_holdout && !pairs.holdout.empty() ? &pairs.holdout : nullptr);
  report.extra["selected_epoch"] = std::to_string(trained.selected_epoch);
  report.initial_loss = trained.initial_loss;
  report.train_loss = trained.epoch_losses.empty() ? trained.initial_loss : trained.epoch_losses.back();
  report.holdout_loss = pairs.holdout.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : log_loss(trained.model, pairs.holdout, masked);
  report.model_digest = model_digest(trained.model);

  BuildConfig bc = config.build;
  bc.threads = config.threads;
  bc.seed = derive_seed(seed, "build");
  const std::size_t n = dataset.size();
  BuildStats stats;
  Graph graph;
  if (n * (n - 1) / 2 <= bc.pair_budget && !config.force_sketch) {
    graph = build_graph_all_pairs(masked, trained.model, bc, &stats);
    report.all_pairs = true;
  } else {
    if (!config.sketch) throw ConfigError("all-pairs build exceeds the pair budget and no sketch is configured");
    SketchConfig sk = *config.sketch;
    sk.seed = derive_seed(seed, "graph_sketch");
    graph = build_graph(masked, trained.model, sk, bc, &stats);
  }
  report.scored_pairs = stats.scored_pairs;
  report.comparison_bound = stats.comparison_bound;
  report.edges = graph.edge_count();

  const auto seeds = seeds_from_dataset(graph, masked);
  const auto predictions = classify(graph, seeds, config.propagation, dataset.class_count(), config.threads);

  std::vector<std::optional<std::size_t>> truth(n);
  std::vector<bool> evaluate(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = dataset[i].label;
    evaluate[i] = !visible[i] && dataset[i].label.has_value();
  }
  report.hidden = static_cast<std::size_t>(std::count(evaluate.begin(), evaluate.end(), true));
  report.summary = summarize(predictions, truth, evaluate);

  if (config.compute_pr) {
    // Correct-prediction confidence: the winning class score against the truth.
    std::vector<double> conf;
    std::vector<bool> hit;
    for (std::size_t i = 0; i < n; ++i) {
      if (!evaluate[i]) continue;
      const auto& p = predictions[i];
      conf.push_back(p.predicted ? p.scores[*p.predicted] : 0.0);
      hit.push_back(p.predicted && *p.predicted == *truth[i]);
    }
    if (std::count(hit.begin(), hit.end(), true) > 0) report.pr_points = pr_curve(conf, hit);
  }
  std::map<std::string, std::string> status;
  for (std::size_t i = 0; i < n; ++i) status[dataset[i].id] = visible[i] ? "seed" : "hidden";
  report.degrees = degree_report(graph, status);
  report.runtime_ms = elapsed_ms(start);
  return report;
}

ExperimentReport run_label_protocol(const Dataset& dataset, double label_fraction, std::uint64_t seed,
                                     const ProtocolConfig& config) {
  const auto visible = sample_visible_labels(dataset, label_fraction, derive_seed(seed, "visible"));
  return run_protocol_with_visible(dataset, visible, seed, config);
}

// ---------------------------------------------------------------------------
// RBF grid baseline

void RbfBaselineConfig::validate() const {
  if (k_grid.empty() || sigma_scale_grid.empty()) throw ConfigError("RBF grid is empty");
  for (auto k : k_grid)
    if (k == 0) throw ConfigError("RBF k must be positive");
  for (auto s : sigma_scale_grid)
    if (!(s > 0.0)) throw ConfigError("RBF bandwidth scales must be positive");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw ConfigError("RBF holdout fraction must be in (0, 1)");
}

RbfBaselineConfig RbfBaselineConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  RbfBaselineConfig r;
  r.k_grid = cfg.get_sizes(prefix + "k_grid", r.k_grid);
  r.sigma_scale_grid = cfg.get_doubles(prefix + "sigma_grid", r.sigma_scale_grid);
  r.holdout_fraction = cfg.get_double(prefix + "holdout_fraction", r.holdout_fraction);
  r.validate();
  return r;
}

namespace {

// k nearest neighbours of every point by squared distance (ties by id).
// Candidates come from a blocked Gram-matrix expansion; the stored distances
// are recomputed exactly so that they are symmetric.
struct NeighborLists {
  std::size_t k = 0;
  std::vector<std::uint32_t> index;  // n * k
  std::vector<double> dist2;         // n * k
};

NeighborLists nearest_neighbors(const Dataset& dataset, std::size_t k, unsigned threads) {
  if (dataset.schema().dense_width() == 0) throw ConfigError("the RBF baseline needs at least one dense mode");
  const std::size_t n = dataset.size();
  if (n < 2) throw Error("the RBF baseline needs at least two points");
  k = std::min(k, n - 1);
  const auto dim = static_cast<Eigen::Index>(dataset.schema().dense_width());
  Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    x.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(dataset.dense_input(i).data(), dim);
  const Eigen::VectorXd norms = x.colwise().squaredNorm().transpose();

  std::vector<std::uint32_t> rank(n);
  {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dataset[a].id < dataset[b].id; });
    for (std::uint32_t r = 0; r < n; ++r) rank[order[r]] = r;
  }

  NeighborLists out;
  out.k = k;
  out.index.resize(n * k);
  out.dist2.resize(n * k);
  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t bb, std::size_t be, unsigned) {
    std::vector<std::uint32_t> cand(n);
    std::vector<double> approx(n);
    for (std::size_t blk = bb; blk < be; ++blk) {
      const std::size_t r0 = blk * kBlock;
      const std::size_t rows = std::min(kBlock, n - r0);
      const Eigen::MatrixXd gram =
          x.middleCols(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(rows)).transpose() * x;
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = r0 + r;
        for (std::size_t j = 0; j < n; ++j)
          approx[j] = std::max(0.0, norms[static_cast<Eigen::Index>(i)] + norms[static_cast<Eigen::Index>(j)] -
                                        2.0 * gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        approx[i] = std::numeric_limits<double>::infinity();
        std::iota(cand.begin(), cand.end(), 0u);
        auto closer = [&](std::uint32_t a, std::uint32_t b) {
          if (approx[a] != approx[b]) return approx[a] < approx[b];
          return rank[a] < rank[b];
        };
        std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), closer);
        std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), closer);
        for (std::size_t t = 0; t < k; ++t) {
          out.index[i * k + t] = cand[t];
          out.dist2[i * k + t] = squared_euclidean(dataset.dense_input(i), dataset.dense_input(cand[t]));
        }
      }
    }
  });
  return out;
}

Graph knn_graph_from_lists(const Dataset& dataset, const NeighborLists& lists, std::size_t k, double sigma) {
  const std::size_t n = dataset.size();
  k = std::min(k, lists.k);
  std::vector<Edge> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      const double w = std::exp(-lists.dist2[i * lists.k + t] / sigma);
      if (!(w > 0.0)) continue;
      auto a = static_cast<std::uint32_t>(i), b = lists.index[i * lists.k + t];
      if (a > b) std::swap(a, b);
      edges.push_back({a, b, w});
    }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.src, a.dst) < std::pair(b.src, b.dst); });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.src == b.src && a.dst == b.dst; }),
              edges.end());
  return Graph(node_ids_of(dataset), std::move(edges));
}

double reference_bandwidth(const NeighborLists& lists) {
  const std::size_t pos = std::min<std::size_t>(10, lists.k) - 1;
  std::vector<double> d;
  for (std::size_t i = 0; i < lists.dist2.size() / lists.k; ++i) d.push_back(lists.dist2[i * lists.k + pos]);
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
  const double m = d[d.size() / 2];
  return m > 0.0 ? m : 1.0;
}

}  // namespace

Graph rbf_knn_graph(const Dataset& dataset, std::size_t k, double sigma, unsigned threads) {
  if (k == 0) throw ConfigError("k must be positive");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  return knn_graph_from_lists(dataset, nearest_neighbors(dataset, k, threads), k, sigma);
}

ExperimentReport rbf_grid_baseline(const Dataset& dataset, double label_fraction, const RbfBaselineConfig& config,
                                   std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (dataset.class_count() < 2) throw Error("the baseline needs at least two classes");
  const auto visible = sample_visible_labels(dataset, label_fraction, derive_seed(seed, "visible"));
  const Dataset masked = mask_labels(dataset, visible);
  const auto split = split_points(masked, config.holdout_fraction, derive_seed(seed, "rbf_split"));

  const std::size_t n = dataset.size();
  const auto k_max = *std::max_element(config.k_grid.begin(), config.k_grid.end());
  const auto lists = nearest_neighbors(dataset, std::max<std::size_t>(k_max, 10), config.threads);
  const double base = reference_bandwidth(lists);

  std::vector<std::optional<std::size_t>> truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = dataset[i].label;
  std::vector<bool> select_eval(n, false);
  for (auto i : split.holdout) select_eval[i] = true;

  std::optional<std::pair<std::size_t, double>> best;
  double best_acc = -1.0;
  std::size_t tried = 0;
  for (auto k : config.k_grid)
    for (auto scale : config.sigma_scale_grid) {
      const double sigma = base * scale;
      const Graph g = knn_graph_from_lists(dataset, lists, k, sigma);
      SeedLabels seeds(n);
      for (auto i : split.train) seeds[i] = dataset[i].label;
      const auto pred = classify_one_shot(g, seeds, dataset.class_count(), config.threads);
      const double acc = summarize(pred, truth, select_eval).accuracy;
      ++tried;
      if (acc > best_acc) {
        best_acc = acc;
        best = {k, sigma};
      }
    }
  if (!best) throw Error("RBF grid produced no valid configuration");

  const Graph g = knn_graph_from_lists(dataset, lists, best->first, best->second);
  SeedLabels seeds(n);
  std::vector<bool> evaluate(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (visible[i]) seeds[i] = dataset[i].label;
    evaluate[i] = !visible[i] && dataset[i].label.has_value();
  }
  const auto pred = classify_one_shot(g, seeds, dataset.class_count(), config.threads);

  ExperimentReport report;
  report.method = "rbf_grid";
  report.summary = summarize(pred, truth, evaluate);
  report.visible = masked.labeled_count();
  report.hidden = static_cast<std::size_t>(std::count(evaluate.begin(), evaluate.end(), true));
  report.all_pairs = true;
  report.scored_pairs = n * (n - 1) / 2;
  report.comparison_bound = report.scored_pairs;
  report.edges = g.edge_count();
  report.extra["best_k"] = std::to_string(best->first);
  report.extra["best_sigma"] = format_exact(best->second);
  report.extra["selection_accuracy"] = format_exact(best_acc);
  report.extra["grid_points"] = std::to_string(tried);
  report.runtime_ms = elapsed_ms(start);
  return report;
}

// ---------------------------------------------------------------------------
// Report writers

void write_report(std::ostream& out, const ExperimentReport& r) {
  KeyValueConfig kv;
  kv.set("method", r.method);
  kv.set("accuracy", format_exact(r.summary.accuracy));
  kv.set("covered_accuracy", format_exact(r.summary.covered_accuracy));
  kv.set("coverage", format_exact(r.summary.coverage));
  kv.set("evaluated", std::to_string(r.summary.evaluated));
  kv.set("correct", std::to_string(r.summary.correct));
  kv.set("abstained", std::to_string(r.summary.abstained));
  kv.set("visible", std::to_string(r.visible));
  kv.set("hidden", std::to_string(r.hidden));
  kv.set("train_pairs", std::to_string(r.train_pairs));
  kv.set("holdout_pairs", std::to_string(r.holdout_pairs));
  kv.set("initial_loss", format_exact(r.initial_loss));
  kv.set("train_loss", format_exact(r.train_loss));
  kv.set("holdout_loss", format_exact(r.holdout_loss));
  kv.set("all_pairs", r.all_pairs ? "true" : "false");
  kv.set("scored_pairs", std::to_string(r.scored_pairs));
  kv.set("comparison_bound", std::to_string(r.comparison_bound));
  kv.set("edges", std::to_string(r.edges));
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.model_digest));
  kv.set("model_digest", digest);
  for (const auto& [k, v] : r.extra) kv.set("extra." + k, v);
  for (const auto& [s, h] : r.degrees) {
    kv.set("degree." + s + ".nodes", std::to_string(h.nodes));
    kv.set("degree." + s + ".zero_fraction", format_exact(h.zero_fraction));
    kv.set("degree." + s + ".strong_fraction", format_exact(h.strong_fraction));
    kv.set("degree." + s + ".median", format_exact(h.median_degree));
    kv.set("degree." + s + ".median_same", format_exact(h.median_same_degree));
  }
  out << kv.to_text();
}

void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve) {
  out << "threshold,precision,recall\n";
  for (const auto& p : curve)
    out << format_exact(p.threshold) << ',' << format_exact(p.precision) << ',' << format_exact(p.recall) << '\n';
}

void write_degree_csv(std::ostream& out, const std::map<std::string, DegreeHistogram>& degrees) {
  out << "status,kind,degree,count\n";
  for (const auto& [s, h] : degrees) {
    for (const auto& [d, c] : h.degree) out << s << ",total," << d << ',' << c << '\n';
    for (const auto& [d, c] : h.same_degree) out << s << ",same," << d << ',' << c << '\n';
  }
}

}  // namespace graphforge
