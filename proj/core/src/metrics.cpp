#include "graphforge/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "graphforge/error.hpp"

namespace graphforge {

namespace {

void check_dims(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

// Four independent accumulators; the summation order is fixed, so the result
// is a pure function of the inputs and (a-b)^2 == (b-a)^2 keeps it symmetric.
double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2], d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  check_dims(a, b);
  return sum_sq_diff(a.data(), b.data(), a.size());
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean(a, b));
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  check_dims(a, b);
  const double na = dot(a.data(), a.data(), a.size());
  const double nb = dot(b.data(), b.data(), b.size());
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double cos = dot(a.data(), b.data(), a.size()) / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

double jaccard_distance(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  const auto& ta = a.tokens();
  const auto& tb = b.tokens();
  std::size_t common = 0;
  auto i = ta.begin();
  auto j = tb.begin();
  while (i != ta.end() && j != tb.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = ta.size() + tb.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

void distance_vector_into(const Point& a, const Point& b, const ModalSchema& schema, std::span<double> out) {
  for (std::size_t m = 0; m < schema.size(); ++m) {
    switch (schema[m].metric) {
      case Metric::euclidean: out[m] = euclidean(a.dense(m), b.dense(m)); break;
      case Metric::cosine: out[m] = cosine_distance(a.dense(m), b.dense(m)); break;
      case Metric::jaccard: out[m] = jaccard_distance(a.tokens(m), b.tokens(m)); break;
    }
  }
}

DistanceVector distance_vector(const Point& a, const Point& b, const ModalSchema& schema) {
  DistanceVector d{std::vector<double>(schema.size())};
  distance_vector_into(a, b, schema, d.values);
  return d;
}

}  // namespace graphforge
