#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graphforge/config.hpp"
#include "graphforge/dataset.hpp"
#include "graphforge/lsh.hpp"
#include "graphforge/metrics.hpp"

namespace graphforge {

/// Layer sizes of the pair scorer. The tower (shared by both points) maps the
/// concatenated dense payloads through `tower_hidden` ReLU layers to a linear
/// embedding of `embedding_dim`; the head maps [emb_a * emb_b, distances]
/// through `head_hidden` ReLU layers to one logit. `embedding_dim == 0`
/// drops the tower and scores from distances alone.
struct Architecture {
  std::vector<std::size_t> tower_hidden;
  std::size_t embedding_dim = 0;
  std::vector<std::size_t> head_hidden{16};

  static Architecture from_config(const KeyValueConfig& cfg, const std::string& prefix = "arch.");
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Symmetric pair scorer G(a, b) in (0, 1).
class SimilarityModel {
 public:
  SimilarityModel() = default;

  /// Fan-in scaled uniform weights, zero biases, unit distance scales.
  static SimilarityModel initialize(const ModalSchema& schema, const Architecture& arch, std::uint64_t seed);

  const Architecture& architecture() const noexcept { return arch_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t distance_count() const noexcept { return distance_scale_.size(); }
  std::uint64_t schema_fingerprint() const noexcept { return schema_fingerprint_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<DenseLayer>& tower() noexcept { return tower_; }
  const std::vector<DenseLayer>& tower() const noexcept { return tower_; }
  std::vector<DenseLayer>& head() noexcept { return head_; }
  const std::vector<DenseLayer>& head() const noexcept { return head_; }

  /// Each distance feature is divided by its scale before entering the head.
  std::vector<double>& distance_scale() noexcept { return distance_scale_; }
  const std::vector<double>& distance_scale() const noexcept { return distance_scale_; }

  /// Dense inputs enter the tower as (x - shift) / scale, per column.
  std::vector<double>& input_shift() noexcept { return input_shift_; }
  const std::vector<double>& input_shift() const noexcept { return input_shift_; }
  std::vector<double>& input_scale() noexcept { return input_scale_; }
  const std::vector<double>& input_scale() const noexcept { return input_scale_; }

  std::size_t parameter_count() const;

  /// Tower output for one point's concatenated dense payloads.
  std::vector<double> embed(std::span<const double> input) const;

  /// Head logit for a pair given both embeddings and the raw distances.
  double logit(std::span<const double> emb_a, std::span<const double> emb_b,
               std::span<const double> distances) const;

  /// sigmoid(logit) kept strictly inside (0, 1).
  double score(std::span<const double> emb_a, std::span<const double> emb_b,
               std::span<const double> distances) const;

  /// Throws ConfigError when `schema` is not the schema the model was built for.
  void check_schema(const ModalSchema& schema) const;

 private:
  friend SimilarityModel read_model(std::istream& in, const std::string& source);

  Architecture arch_;
  std::size_t input_dim_ = 0;
  std::uint64_t schema_fingerprint_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<DenseLayer> tower_;
  std::vector<DenseLayer> head_;
  std::vector<double> distance_scale_;
  std::vector<double> input_shift_;
  std::vector<double> input_scale_;
};

/// Largest score the model reports; 1 - this is the smallest.
inline constexpr double kScoreMargin = 1e-15;

/// Logistic function clamped to [kScoreMargin, 1 - kScoreMargin].
double bounded_sigmoid(double logit);

/// G(a, b); exactly equal to G(b, a).
double predict(const SimilarityModel& model, const Point& a, const Point& b, const ModalSchema& schema);

/// Scores dataset points by index with embeddings computed once up front.
class ModelScorer {
 public:
  ModelScorer(const SimilarityModel& model, const Dataset& dataset, unsigned threads = 1);

  double operator()(std::size_t i, std::size_t j) const;
  const std::vector<double>& embedding(std::size_t i) const { return embeddings_[i]; }

  /// As a type-erased PairScorer; the ModelScorer must outlive it.
  PairScorer as_pair_scorer() const {
    return [this](std::size_t i, std::size_t j) { return (*this)(i, j); };
  }

 private:
  const SimilarityModel* model_;
  const Dataset* dataset_;
  std::vector<std::vector<double>> embeddings_;
};

/// One oracle-labelled pair. index_a < index_b refer to dataset positions
/// and id_a/id_b to the matching point ids.
struct PairExample {
  std::string id_a;
  std::string id_b;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  DistanceVector distances;
  std::vector<double> extras;  // reserved for pairwise features beyond the per-mode distances
  bool label = false;
};

struct HarvestedPairs {
  std::vector<PairExample> train;
  std::vector<PairExample> holdout;
  std::size_t cross_split = 0;  // pairs with one endpoint on each side
  std::size_t undecided = 0;    // pairs the oracle cannot label
};

/// Routes every distinct co-bucketed pair: to train when both endpoints are
/// train points, to holdout when both are holdout points, otherwise dropped.
/// Pairs the oracle cannot decide are dropped too. Throws when nothing
/// survives.
HarvestedPairs harvest_training_pairs(const Dataset& dataset, const PointSplit& split,
                                      const std::vector<Bucket>& buckets);

/// As above over every pair of split points (no sketching).
HarvestedPairs harvest_all_pairs(const Dataset& dataset, const PointSplit& split);

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  /// Negatives kept per positive each epoch; <= 0 keeps all negatives.
  double negative_subsample_ratio = 4.0;
  double l2 = 0.0;

  void validate() const;
  static TrainConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "train.");
};

struct TrainResult {
  SimilarityModel model;
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;  // mean log-loss over all examples after each epoch
  std::vector<double> validation_losses;  // per epoch, when validation pairs were given
  std::size_t selected_epoch = 0;         // epoch whose parameters were kept (0 = final)
};

/// Mini-batch gradient descent with momentum on the mean binary log-loss.
/// Deterministic for a fixed config seed. With `validation` pairs the
/// parameters after the epoch of lowest validation loss are returned.
TrainResult train(const std::vector<PairExample>& examples, const Dataset& dataset, const TrainConfig& config,
                  const Architecture& arch, const std::vector<PairExample>* validation = nullptr);

/// Mean binary log-loss of `model` over `examples`.
double log_loss(const SimilarityModel& model, std::span<const PairExample> examples, const Dataset& dataset);

/// Parameter-shaped gradient storage.
struct Gradients {
  std::vector<DenseLayer> tower;
  std::vector<DenseLayer> head;

  static Gradients zeros_like(const SimilarityModel& model);
};

/// Mean log-loss over `batch` and its exact gradient (batched forward and
/// backward pass).
double loss_and_gradients(const SimilarityModel& model, std::span<const PairExample> batch, const Dataset& dataset,
                          Gradients& grads);

using GradientFn =
    std::function<double(const SimilarityModel&, std::span<const PairExample>, const Dataset&, Gradients&)>;

/// Largest relative difference between `analytic` and central finite
/// differences (step 1e-5) over every parameter. The relative error of one
/// parameter is |a - n| / max(|a|, |n|, 1e-8).
double gradient_check(const SimilarityModel& model, std::span<const PairExample> batch, const Dataset& dataset,
                      const GradientFn& analytic = loss_and_gradients, double step = 1e-5);

void write_model(std::ostream& out, const SimilarityModel& model);
SimilarityModel read_model(std::istream& in, const std::string& source = "<model>");
void save_model(const std::filesystem::path& path, const SimilarityModel& model);
SimilarityModel load_model(const std::filesystem::path& path);

}  // namespace graphforge
