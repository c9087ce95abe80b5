#include "graphforge/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

#include "graphforge/error.hpp"
#include "graphforge/random.hpp"

namespace graphforge::synthetic {

namespace {

std::string point_id(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return std::string(prefix) + buf;
}

}  // namespace

Dataset make_clustered(const ClusteredConfig& config) {
  if (config.clusters == 0 || config.points_per_cluster == 0 || config.dense_dim == 0)
    throw ConfigError("clustered data needs clusters, points and a dense dimension");
  if (config.tokens_per_point > config.cluster_vocabulary)
    throw ConfigError("tokens_per_point exceeds cluster_vocabulary");
  std::vector<ModeSpec> modes{{"vec", ModeKind::dense, config.dense_dim, Metric::euclidean},
                              {"tags", ModeKind::token_set, 0, Metric::jaccard}};
  if (config.noise_dim > 0) modes.push_back({"noise", ModeKind::dense, config.noise_dim, Metric::euclidean});
  ModalSchema schema(modes);

  Rng rng = make_rng(config.seed, "clustered");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> centers(config.clusters, std::vector<double>(config.dense_dim));
  for (auto& c : centers)
    for (auto& v : c) v = config.center_scale * normal(rng);

  std::vector<std::size_t> vocab(config.cluster_vocabulary);
  std::iota(vocab.begin(), vocab.end(), 0);
  std::uniform_int_distribution<std::size_t> noise_token(0, std::max<std::size_t>(config.noise_vocabulary, 1) - 1);

  std::vector<Point> points;
  points.reserve(config.clusters * config.points_per_cluster);
  std::size_t next = 0;
  for (std::size_t c = 0; c < config.clusters; ++c)
    for (std::size_t k = 0; k < config.points_per_cluster; ++k) {
      Point p;
      p.id = point_id("p", next++);
      p.label = c;
      DenseVector vec(config.dense_dim);
      for (std::size_t d = 0; d < config.dense_dim; ++d) vec[d] = centers[c][d] + config.spread * normal(rng);
      p.payloads.emplace_back(std::move(vec));

      std::shuffle(vocab.begin(), vocab.end(), rng);
      std::vector<std::string> tokens;
      for (std::size_t t = 0; t < config.tokens_per_point; ++t)
        tokens.push_back("c" + std::to_string(c) + "_" + std::to_string(vocab[t]));
      for (std::size_t t = 0; t < config.noise_tokens && config.noise_vocabulary > 0; ++t)
        tokens.push_back("n" + std::to_string(noise_token(rng)));
      p.payloads.emplace_back(TokenSet(std::move(tokens)));

      if (config.noise_dim > 0) {
        DenseVector noise(config.noise_dim);
        for (auto& v : noise) v = normal(rng);
        p.payloads.emplace_back(std::move(noise));
      }
      points.push_back(std::move(p));
    }
  return Dataset(std::move(schema), std::move(points), config.clusters);
}

Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation, double spread,
                   std::uint64_t seed) {
  if (classes == 0 || per_class == 0 || dim == 0) throw ConfigError("blobs need classes, points and a dimension");
  ModalSchema schema({{"x", ModeKind::dense, dim, Metric::euclidean}});
  Rng rng = make_rng(seed, "blobs");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> points;
  std::size_t next = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    // Centres on the coordinate axes, `separation` apart from the origin.
    std::vector<double> center(dim, 0.0);
    center[c % dim] = separation * static_cast<double>(1 + c / dim) * ((c / dim) % 2 ? -1.0 : 1.0);
    for (std::size_t k = 0; k < per_class; ++k) {
      DenseVector x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = center[d] + spread * normal(rng);
      points.push_back({point_id("b", next++), {std::move(x)}, c});
    }
  }
  return Dataset(std::move(schema), std::move(points), classes);
}

PlantedGraph make_planted(const PlantedConfig& config) {
  if (config.community_shares.empty()) throw ConfigError("planted graph needs at least one community");
  const double share_total =
      std::accumulate(config.community_shares.begin(), config.community_shares.end(), 0.0);
  Rng rng = make_rng(config.seed, "planted");
  PlantedGraph out;
  out.community.resize(config.nodes);
  {
    std::size_t node = 0;
    double acc = 0.0;
    for (std::size_t c = 0; c < config.community_shares.size(); ++c) {
      acc += config.community_shares[c];
      const auto end = c + 1 == config.community_shares.size()
                           ? config.nodes
                           : static_cast<std::size_t>(acc / share_total * static_cast<double>(config.nodes) + 0.5);
      for (; node < end; ++node) out.community[node] = c;
    }
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < config.nodes; ++i) ids.push_back(point_id("n", i));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < config.nodes; ++i)
    for (std::size_t j = i + 1; j < config.nodes; ++j) {
      const bool same = out.community[i] == out.community[j];
      if (u(rng) >= (same ? config.p_in : config.p_out)) continue;
      const double lo = same ? config.w_in_lo : config.w_out_lo;
      const double hi = same ? config.w_in_hi : config.w_out_hi;
      edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), lo + (hi - lo) * u(rng)});
    }
  out.graph = Graph(std::move(ids), std::move(edges));
  return out;
}

}  // namespace graphforge::synthetic
