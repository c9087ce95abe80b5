#pragma once

#include <span>
#include <vector>

#include "graphforge/dataset.hpp"

namespace graphforge {

/// L2 norm of a - b. Throws on dimension mismatch.
double euclidean(std::span<const double> a, std::span<const double> b);

/// Squared L2 distance (no sqrt); same summation order as `euclidean`.
double squared_euclidean(std::span<const double> a, std::span<const double> b);

/// 1 - cos(a, b), clamped to [0, 2]. A zero vector is at distance 1 from
/// everything, itself included.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// 1 - |a n b| / |a u b|; two empty sets are at distance 0.
double jaccard_distance(const TokenSet& a, const TokenSet& b);

/// Per-mode distances of a pair, in schema order. Exactly symmetric.
struct DistanceVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  friend bool operator==(const DistanceVector&, const DistanceVector&) = default;
};

DistanceVector distance_vector(const Point& a, const Point& b, const ModalSchema& schema);

/// Allocation-free variant; `out.size()` must equal `schema.size()`.
void distance_vector_into(const Point& a, const Point& b, const ModalSchema& schema, std::span<double> out);

}  // namespace graphforge
