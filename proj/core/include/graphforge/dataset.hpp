#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace graphforge {

enum class ModeKind { dense, token_set };
enum class Metric { euclidean, cosine, jaccard };

std::string_view to_string(ModeKind kind);
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

struct ModeSpec {
  std::string name;
  ModeKind kind = ModeKind::dense;
  std::size_t dim = 0;  // dense modes only
  Metric metric = Metric::euclidean;
};

/// Ordered list of feature modes. Mode i of every point is compared with
/// metric i; the number of modes is the length of every distance vector.
class ModalSchema {
 public:
  ModalSchema() = default;
  explicit ModalSchema(std::vector<ModeSpec> modes);

  const std::vector<ModeSpec>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const ModeSpec& operator[](std::size_t i) const { return modes_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;

  /// Sum of dims over dense modes (the two-tower input width).
  std::size_t dense_width() const;

  /// Canonical text form (the `mode.N.*` keys of a schema file).
  std::string to_text() const;
  std::uint64_t fingerprint() const;

  friend bool operator==(const ModalSchema& a, const ModalSchema& b) { return a.to_text() == b.to_text(); }

 private:
  std::vector<ModeSpec> modes_;
};

/// Schema file contents: the mode list plus an optional declared class count
/// (`classes=N`).
struct SchemaDocument {
  ModalSchema schema;
  std::optional<std::size_t> class_count;
};

SchemaDocument parse_schema(std::string_view text, const std::string& source = "<schema>");
SchemaDocument load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const SchemaDocument& doc);

/// Sorted, de-duplicated tokens with their 64-bit hashes (same order).
class TokenSet {
 public:
  TokenSet() = default;
  explicit TokenSet(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& hashes() const noexcept { return hashes_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  friend bool operator==(const TokenSet& a, const TokenSet& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> hashes_;
};

using DenseVector = std::vector<double>;
using Payload = std::variant<DenseVector, TokenSet>;

struct Point {
  std::string id;
  std::vector<Payload> payloads;
  std::optional<std::size_t> label;

  bool labeled() const noexcept { return label.has_value(); }
  const DenseVector& dense(std::size_t mode) const { return std::get<DenseVector>(payloads[mode]); }
  const TokenSet& tokens(std::size_t mode) const { return std::get<TokenSet>(payloads[mode]); }

  friend bool operator==(const Point&, const Point&) = default;
};

/// Immutable set of points conforming to one schema. Construction validates
/// payload shapes, id uniqueness and label range.
class Dataset {
 public:
  Dataset() = default;
  Dataset(ModalSchema schema, std::vector<Point> points, std::size_t class_count);

  const ModalSchema& schema() const noexcept { return schema_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t labeled_count() const noexcept { return labeled_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Concatenated dense payloads of point i (tower input), cached.
  const std::vector<double>& dense_input(std::size_t i) const { return dense_inputs_[i]; }

 private:
  ModalSchema schema_;
  std::vector<Point> points_;
  std::size_t class_count_ = 0;
  std::size_t labeled_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> dense_inputs_;
};

/// Reads the tab-separated point file (`id<TAB>label|-<TAB>mode1...`). When
/// `class_count` is absent it is one past the largest label seen.
Dataset load_dataset(const std::filesystem::path& path, const ModalSchema& schema,
                     std::optional<std::size_t> class_count = std::nullopt);
Dataset parse_dataset(std::istream& in, const ModalSchema& schema,
                      std::optional<std::size_t> class_count, const std::string& source);
void save_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Copy of `dataset` in which only points with `keep[i]` retain their label.
Dataset mask_labels(const Dataset& dataset, const std::vector<bool>& keep);

/// Same-class oracle: 1 if both labeled with equal labels, 0 if both labeled
/// with different labels, absent if either point is unlabeled.
std::optional<bool> oracle_same_class(const Point& a, const Point& b);

struct PointSplit {
  std::vector<std::size_t> train;    // point indices, ascending
  std::vector<std::size_t> holdout;  // point indices, ascending
  std::vector<std::string> warnings;

  /// 1 = train, 2 = holdout, 0 = neither; indexed by point.
  std::vector<std::uint8_t> side;

  bool in_train(std::size_t i) const { return side[i] == 1; }
  bool in_holdout(std::size_t i) const { return side[i] == 2; }
};

/// Class-stratified split of the labeled points. The holdout receives
/// round(fraction * labeled) points overall; every class with at least two
/// labeled points lands on both sides. Classes with a single labeled point go
/// wholly to train and produce a warning.
PointSplit split_points(const Dataset& dataset, double holdout_fraction, std::uint64_t seed);

}  // namespace graphforge
