#pragma once

#include <unistd.h>

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "graphforge/dataset.hpp"
#include "graphforge/metrics.hpp"
#include "graphforge/model.hpp"

namespace gf_test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("graphforge_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline graphforge::ModalSchema dense_schema(std::size_t dim, graphforge::Metric metric = graphforge::Metric::euclidean) {
  return graphforge::ModalSchema({{"x", graphforge::ModeKind::dense, dim, metric}});
}

inline graphforge::Point dense_point(std::string id, std::vector<double> x,
                                     std::optional<std::size_t> label = std::nullopt) {
  return {std::move(id), {graphforge::Payload(std::move(x))}, label};
}

/// Uniform random dense points, all labelled by index parity.
inline graphforge::Dataset random_dense(std::size_t n, std::size_t dim, std::uint64_t seed, std::size_t classes = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<graphforge::Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (auto& v : x) v = normal(rng);
    pts.push_back(dense_point("r" + std::to_string(1000000 + i), std::move(x), i % classes));
  }
  return graphforge::Dataset(dense_schema(dim), std::move(pts), classes);
}

inline graphforge::PairExample make_example(const graphforge::Dataset& d, std::size_t i, std::size_t j, bool label) {
  graphforge::PairExample ex;
  ex.index_a = i;
  ex.index_b = j;
  ex.id_a = d[i].id;
  ex.id_b = d[j].id;
  ex.distances = graphforge::distance_vector(d[i], d[j], d.schema());
  ex.label = label;
  return ex;
}

}  // namespace gf_test
