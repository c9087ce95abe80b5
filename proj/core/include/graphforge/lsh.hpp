#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphforge/config.hpp"
#include "graphforge/dataset.hpp"

namespace graphforge {

enum class HashFamily { minhash, random_hyperplane, p_stable };

std::string_view to_string(HashFamily family);

struct HashFamilySpec {
  std::string mode_name;
  HashFamily family = HashFamily::minhash;
  double width = 4.0;  // p_stable bucket width
  /// Components concatenated inside one sub-hash: minhash values, sign bits,
  /// or quantized projections.
  std::size_t bits_per_function = 1;
};

enum class Composition {
  and_modes,  // every function concatenates one sub-hash per listed family
  or_modes,   // function k uses family k mod |families| alone
};

struct SketchConfig {
  std::vector<HashFamilySpec> families;
  Composition composition = Composition::and_modes;
  std::size_t num_functions = 8;
  std::size_t bucket_cap = 100;
  std::optional<std::size_t> drop_threshold;
  std::uint64_t seed = 0;

  /// Throws ConfigError when the config is inconsistent with itself or the schema.
  void validate(const ModalSchema& schema) const;

  /// Reads `<prefix>functions`, `<prefix>bucket_cap`, `<prefix>family.N.*`, ...
  static SketchConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "sketch.");
};

/// A sampled set of S hash functions over one schema. Immutable once sampled
/// and safe to share between threads.
class HashFunctionSet {
 public:
  static HashFunctionSet sample(const SketchConfig& config, const ModalSchema& schema);

  std::size_t size() const noexcept { return functions_.size(); }

  /// Mode indices a function reads (one per sub-hash, in concatenation order).
  std::vector<std::size_t> modes_of(std::size_t function) const;

  /// Key bytes of one function applied to one point.
  std::string key(std::size_t function, const Point& p) const;

  /// (function index, key) for every function, in function order.
  std::vector<std::pair<std::size_t, std::string>> hash_point(const Point& p) const;

 private:
  struct SubHash {
    std::size_t mode = 0;
    HashFamily family = HashFamily::minhash;
    std::size_t components = 1;
    std::size_t dim = 0;
    double width = 1.0;
    std::vector<std::uint64_t> salts;   // minhash
    std::vector<double> projections;    // components x dim, row-major
    std::vector<double> offsets;        // p_stable
  };
  struct Function {
    std::vector<SubHash> parts;
  };

  static void append_key(const SubHash& h, const Point& p, std::string& out);

  std::vector<Function> functions_;
};

/// Hashes `p` with every sampled function.
inline std::vector<std::pair<std::size_t, std::string>> hash_point(const Point& p, const HashFunctionSet& functions) {
  return functions.hash_point(p);
}

struct Bucket {
  /// 4-byte big-endian function index followed by the function's key bytes.
  std::string hash_key;
  std::vector<std::size_t> members;  // point indices
};

struct SketchStats {
  std::size_t sketches = 0;         // S * N
  std::size_t raw_groups = 0;       // distinct (function, key) groups
  std::size_t dropped_groups = 0;   // groups above drop_threshold
  std::size_t subdivided_groups = 0;
};

/// Hash every point with S sampled functions, group equal (function, key)
/// sketches, drop groups above the drop threshold, randomly subdivide groups
/// above the bucket cap, and discard singletons.
std::vector<Bucket> nn_sketching(const Dataset& dataset, const SketchConfig& config, unsigned threads = 1,
                                 SketchStats* stats = nullptr);

/// Same as above with an already sampled function set.
std::vector<Bucket> nn_sketching(const Dataset& dataset, const SketchConfig& config,
                                 const HashFunctionSet& functions, unsigned threads = 1,
                                 SketchStats* stats = nullptr);

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

/// Distinct (lo, hi) point-index pairs co-occurring in some bucket, sorted.
/// `raw_pairs`, if given, receives the count before de-duplication.
std::vector<IndexPair> candidate_pairs(const std::vector<Bucket>& buckets, std::size_t* raw_pairs = nullptr);

/// Upper bound S * N * K on the pairs any sketch of this config can emit.
std::size_t comparison_bound(const SketchConfig& config, std::size_t points);

/// Debug dump: `hash_key_hex<TAB>id1,id2,...` per bucket.
void write_buckets(std::ostream& out, const std::vector<Bucket>& buckets, const Dataset& dataset);

/// Symmetric pair score in [0, 1] (usually a trained similarity model).
using PairScorer = std::function<double(std::size_t, std::size_t)>;

struct SensitivityReport {
  double p_hat = 0.0;  // candidate pairs scoring >= r
  double q_hat = 0.0;  // candidate pairs scoring < cr
  double baseline_p = 0.0;
  double baseline_q = 0.0;
  double r = 0.0;
  double cr = 0.0;
  std::size_t candidate_pairs = 0;
  std::size_t sample_count = 0;
};

/// Fractions of strong (score >= r) and weak (score < cr) ties among the
/// pairs the sketch proposes, next to the same fractions over `sample`
/// uniformly random distinct pairs.
SensitivityReport measure_sensitivity(const Dataset& dataset, const SketchConfig& config, const PairScorer& scorer,
                                      double r, double cr, std::size_t sample, std::uint64_t seed,
                                      unsigned threads = 1);

}  // namespace graphforge
