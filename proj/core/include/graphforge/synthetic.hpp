#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graphforge/dataset.hpp"
#include "graphforge/graph.hpp"

namespace graphforge::synthetic {

/// Clustered points with a dense mode "vec" (euclidean) and a token-set mode
/// "tags" (jaccard), plus an optional dense "noise" mode that carries no
/// cluster information. Labels are cluster indices.
struct ClusteredConfig {
  std::size_t clusters = 10;
  std::size_t points_per_cluster = 50;
  std::size_t dense_dim = 16;
  double center_scale = 3.0;    // std-dev of cluster centres
  double spread = 1.0;          // std-dev of points around their centre
  std::size_t cluster_vocabulary = 20;
  std::size_t tokens_per_point = 12;
  std::size_t noise_vocabulary = 1000;
  std::size_t noise_tokens = 2;
  std::size_t noise_dim = 0;    // 0 drops the noise mode
  std::uint64_t seed = 1;
};

Dataset make_clustered(const ClusteredConfig& config);

/// Isotropic Gaussian blobs in one dense mode "x" (euclidean).
Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation, double spread,
                   std::uint64_t seed);

/// Random graph with planted communities: same-community pairs are linked
/// with probability p_in, others with p_out. Weights are uniform in
/// [w_in_lo, w_in_hi] or [w_out_lo, w_out_hi].
struct PlantedGraph {
  Graph graph;
  std::vector<std::size_t> community;
};

struct PlantedConfig {
  std::size_t nodes = 200;
  std::vector<double> community_shares{0.5, 0.5};
  double p_in = 0.1;
  double p_out = 0.01;
  double w_in_lo = 0.6, w_in_hi = 0.95;
  double w_out_lo = 0.05, w_out_hi = 0.4;
  std::uint64_t seed = 1;
};

PlantedGraph make_planted(const PlantedConfig& config);

}  // namespace graphforge::synthetic
