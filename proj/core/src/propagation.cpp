#include "graphforge/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "graphforge/error.hpp"
#include "graphforge/parallel.hpp"

namespace graphforge {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::product_one_shot: return "product_one_shot";
    case Rule::iterative: return "iterative";
    case Rule::max_edge: return "max_edge";
  }
  return "?";
}

Rule parse_rule(std::string_view name) {
  if (name == "product_one_shot" || name == "one_shot" || name == "product") return Rule::product_one_shot;
  if (name == "iterative") return Rule::iterative;
  if (name == "max_edge") return Rule::max_edge;
  throw ConfigError("unknown rule '" + std::string(name) + "' (expected product_one_shot, iterative or max_edge)");
}

void PropagationConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0) throw ConfigError("alpha and beta must be non-negative");
  if (rule == Rule::iterative) {
    if (!(alpha + beta > 0.0)) throw ConfigError("alpha + beta must be positive for the iterative rule");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
  }
}

PropagationConfig PropagationConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  PropagationConfig p;
  p.alpha = cfg.get_double(prefix + "alpha", p.alpha);
  p.beta = cfg.get_double(prefix + "beta", p.beta);
  const auto it = cfg.get_int(prefix + "iterations", static_cast<std::int64_t>(p.iterations));
  if (it < 1) throw ConfigError(prefix + "iterations must be >= 1");
  p.iterations = static_cast<std::size_t>(it);
  if (auto r = cfg.get(prefix + "rule")) p.rule = parse_rule(*r);
  p.validate();
  return p;
}

SeedLabels seeds_from_dataset(const Graph& graph, const Dataset& dataset) {
  SeedLabels seeds(graph.node_count());
  for (std::size_t n = 0; n < graph.node_count(); ++n)
    if (auto i = dataset.index_of(graph.id(n))) seeds[n] = dataset[*i].label;
  return seeds;
}

SeedLabels seeds_from_map(const Graph& graph, const std::map<std::string, std::size_t>& labels) {
  SeedLabels seeds(graph.node_count());
  for (const auto& [id, c] : labels) {
    auto n = graph.index_of(id);
    if (!n) throw Error("seed '" + id + "' is not a graph node");
    seeds[*n] = c;
  }
  return seeds;
}

namespace {

void check_seeds(const Graph& graph, const SeedLabels& seeds, std::size_t class_count) {
  if (seeds.size() != graph.node_count()) throw Error("seed vector does not match the graph's node count");
  if (class_count == 0) throw Error("class count must be positive");
  for (const auto& s : seeds)
    if (s && *s >= class_count) throw Error("seed label " + std::to_string(*s) + " out of range");
}

// Argmax with the lowest index winning ties.
std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<LabelScores> classify_one_shot(const Graph& graph, const SeedLabels& seeds, std::size_t class_count,
                                           unsigned threads) {
  check_seeds(graph, seeds, class_count);
  std::vector<LabelScores> out(graph.node_count());
  parallel_for(graph.node_count(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<double> log_sum(class_count);
    std::vector<bool> present(class_count);
    for (std::size_t i = b; i < e; ++i) {
      auto& r = out[i];
      r.scores.assign(class_count, 1.0);
      std::fill(log_sum.begin(), log_sum.end(), 0.0);
      std::fill(present.begin(), present.end(), false);
      for (const auto& nb : graph.neighbors(i)) {
        const auto& c = seeds[nb.node];
        if (!c) continue;
        r.scores[*c] *= nb.weight;
        log_sum[*c] += std::log(nb.weight);
        present[*c] = true;
      }
      std::optional<std::size_t> best;
      for (std::size_t c = 0; c < class_count; ++c) {
        if (!present[c]) {
          r.scores[c] = 0.0;
          continue;
        }
        if (!best || log_sum[c] > log_sum[*best]) best = c;
      }
      r.predicted = best;
      r.abstained = !best;
    }
  });
  return out;
}

std::vector<double> classify_max_edge(const Graph& graph, const std::vector<bool>& seeds, unsigned threads) {
  if (seeds.size() != graph.node_count()) throw Error("seed vector does not match the graph's node count");
  std::vector<double> out(graph.node_count(), 0.0);
  parallel_for(graph.node_count(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i)
      for (const auto& nb : graph.neighbors(i))
        if (seeds[nb.node]) out[i] = std::max(out[i], nb.weight);
  });
  return out;
}

std::vector<LabelScores> classify_max_edge(const Graph& graph, const SeedLabels& seeds, std::size_t class_count,
                                           unsigned threads) {
  check_seeds(graph, seeds, class_count);
  std::vector<LabelScores> out(graph.node_count());
  parallel_for(graph.node_count(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) {
      auto& r = out[i];
      r.scores.assign(class_count, 0.0);
      bool any = false;
      for (const auto& nb : graph.neighbors(i))
        if (const auto& c = seeds[nb.node]) {
          r.scores[*c] = std::max(r.scores[*c], nb.weight);
          any = true;
        }
      r.abstained = !any;
      if (any) r.predicted = argmax(r.scores);
    }
  });
  return out;
}

std::vector<LabelScores> propagate_iterative(const Graph& graph, const SeedLabels& seeds,
                                             const PropagationConfig& config, std::size_t class_count,
                                             unsigned threads) {
  check_seeds(graph, seeds, class_count);
  PropagationConfig checked = config;
  checked.rule = Rule::iterative;
  checked.validate();
  const std::size_t n = graph.node_count();
  const std::size_t C = class_count;
  std::vector<double> cur(n * C, 1.0 / static_cast<double>(C));
  for (std::size_t i = 0; i < n; ++i)
    if (seeds[i]) {
      std::fill_n(cur.begin() + static_cast<std::ptrdiff_t>(i * C), C, 0.0);
      cur[i * C + *seeds[i]] = 1.0;
    }
  std::vector<double> next(n * C);
  for (std::size_t round = 0; round < config.iterations; ++round) {
    parallel_for(n, threads, [&](std::size_t b, std::size_t e, unsigned) {
      std::vector<double> avg(C);
      for (std::size_t i = b; i < e; ++i) {
        double total = 0.0;
        std::fill(avg.begin(), avg.end(), 0.0);
        for (const auto& nb : graph.neighbors(i)) {
          total += nb.weight;
          for (std::size_t c = 0; c < C; ++c) avg[c] += nb.weight * cur[nb.node * C + c];
        }
        double* dst = next.data() + i * C;
        const double* prev = cur.data() + i * C;
        if (!(total > 0.0)) {
          std::copy_n(prev, C, dst);
          continue;
        }
        for (std::size_t c = 0; c < C; ++c) {
          const double anchor = seeds[i] ? (*seeds[i] == c ? 1.0 : 0.0) : prev[c];
          dst[c] = config.alpha * anchor + config.beta * (avg[c] / total);
        }
      }
    });
    cur.swap(next);
  }
  std::vector<LabelScores> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = out[i];
    r.scores.assign(cur.begin() + static_cast<std::ptrdiff_t>(i * C),
                    cur.begin() + static_cast<std::ptrdiff_t>((i + 1) * C));
    const auto [lo, hi] = std::minmax_element(r.scores.begin(), r.scores.end());
    r.abstained = *lo == *hi;
    if (!r.abstained) r.predicted = argmax(r.scores);
  }
  return out;
}

std::vector<LabelScores> classify(const Graph& graph, const SeedLabels& seeds, const PropagationConfig& config,
                                  std::size_t class_count, unsigned threads) {
  switch (config.rule) {
    case Rule::product_one_shot: return classify_one_shot(graph, seeds, class_count, threads);
    case Rule::max_edge: return classify_max_edge(graph, seeds, class_count, threads);
    case Rule::iterative: return propagate_iterative(graph, seeds, config, class_count, threads);
  }
  throw ConfigError("unknown rule");
}

double potts_loss(const Graph& graph, const std::vector<LabelScores>& scores, const SeedLabels& seeds,
                  std::size_t class_count) {
  check_seeds(graph, seeds, class_count);
  if (scores.size() != graph.node_count()) throw Error("score vector does not match the graph's node count");
  const double uniform = 1.0 / static_cast<double>(class_count);
  auto value = [&](std::size_t i, std::size_t c) {
    if (scores[i].abstained || scores[i].scores.size() != class_count) return uniform;
    return scores[i].scores[c];
  };
  double loss = 0.0;
  for (const auto& e : graph.edges()) {
    double diff = 0.0;
    for (std::size_t c = 0; c < class_count; ++c) diff += std::abs(value(e.src, c) - value(e.dst, c));
    loss += e.weight * diff;
  }
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    if (seeds[i])
      for (std::size_t c = 0; c < class_count; ++c) loss += std::abs(value(i, c) - (*seeds[i] == c ? 1.0 : 0.0));
  return loss;
}

void write_predictions(std::ostream& out, const Graph& graph, const std::vector<LabelScores>& scores) {
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& r = scores.at(i);
    out << graph.id(i) << '\t';
    if (r.abstained || !r.predicted)
      out << "ABSTAIN";
    else
      out << *r.predicted;
    out << '\t';
    for (std::size_t c = 0; c < r.scores.size(); ++c) out << (c ? "," : "") << format_digits(r.scores[c], 9);
    out << '\n';
  }
}

void save_predictions(const std::filesystem::path& path, const Graph& graph, const std::vector<LabelScores>& scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write predictions file: " + path.string());
  write_predictions(out, graph, scores);
  if (!out) throw Error("error writing predictions file: " + path.string());
}

}  // namespace graphforge
