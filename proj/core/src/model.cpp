#include "graphforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "graphforge/error.hpp"
#include "graphforge/parallel.hpp"
#include "graphforge/random.hpp"

namespace graphforge {

Architecture Architecture::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  Architecture a;
  a.tower_hidden = cfg.get_sizes(prefix + "tower_hidden", a.tower_hidden);
  a.embedding_dim = static_cast<std::size_t>(cfg.get_int(prefix + "embedding_dim", 0));
  a.head_hidden = cfg.get_sizes(prefix + "head_hidden", a.head_hidden);
  for (auto s : a.tower_hidden)
    if (s == 0) throw ConfigError(prefix + "tower_hidden sizes must be positive");
  for (auto s : a.head_hidden)
    if (s == 0) throw ConfigError(prefix + "head_hidden sizes must be positive");
  if (!a.tower_hidden.empty() && a.embedding_dim == 0)
    throw ConfigError(prefix + "tower_hidden given but embedding_dim is 0");
  return a;
}

namespace {

DenseLayer make_layer(std::size_t in, std::size_t out, Rng& rng, double gain = 1.0) {
  DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))};
  const double limit = gain * std::sqrt(6.0 / static_cast<double>(in));
  std::uniform_real_distribution<double> u(-limit, limit);
  // Column-major fill order keeps the stream layout-independent of Eigen.
  for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = u(rng);
  return layer;
}

// out = W x + b, summed over columns in index order.
void affine(const DenseLayer& layer, const double* x, double* out) {
  const auto rows = layer.weight.rows();
  const auto cols = layer.weight.cols();
  for (Eigen::Index r = 0; r < rows; ++r) out[r] = layer.bias[r];
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double xc = x[c];
    const double* col = layer.weight.data() + c * rows;
    for (Eigen::Index r = 0; r < rows; ++r) out[r] += col[r] * xc;
  }
}

}  // namespace

SimilarityModel SimilarityModel::initialize(const ModalSchema& schema, const Architecture& arch,
                                            std::uint64_t seed) {
  SimilarityModel m;
  m.arch_ = arch;
  m.input_dim_ = schema.dense_width();
  m.schema_fingerprint_ = schema.fingerprint();
  m.seed_ = seed;
  m.distance_scale_.assign(schema.size(), 1.0);
  m.input_shift_.assign(m.input_dim_, 0.0);
  m.input_scale_.assign(m.input_dim_, 1.0);
  Rng rng = make_rng(seed, "model_init");
  if (arch.embedding_dim > 0) {
    if (m.input_dim_ == 0) throw ConfigError("embedding towers need at least one dense mode");
    std::size_t in = m.input_dim_;
    for (auto h : arch.tower_hidden) {
      m.tower_.push_back(make_layer(in, h, rng));
      in = h;
    }
    m.tower_.push_back(make_layer(in, arch.embedding_dim, rng));
  }
  std::size_t in = arch.embedding_dim + schema.size();
  for (auto h : arch.head_hidden) {
    m.head_.push_back(make_layer(in, h, rng));
    in = h;
  }
  // A small output layer starts every pair score close to one half.
  m.head_.push_back(make_layer(in, 1, rng, 0.01));
  return m;
}

std::size_t SimilarityModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto* layers : {&tower_, &head_})
    for (const auto& l : *layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void SimilarityModel::check_schema(const ModalSchema& schema) const {
  if (schema.fingerprint() != schema_fingerprint_ || schema.size() != distance_count() ||
      schema.dense_width() != input_dim_)
    throw ConfigError("schema/model mismatch: model was trained on a different schema");
}

std::vector<double> SimilarityModel::embed(std::span<const double> input) const {
  if (tower_.empty()) return {};
  if (input.size() != input_dim_) throw Error("tower input width mismatch");
  std::vector<double> cur(input.size());
  for (std::size_t k = 0; k < cur.size(); ++k) cur[k] = (input[k] - input_shift_[k]) / input_scale_[k];
  std::vector<double> next;
  for (std::size_t l = 0; l < tower_.size(); ++l) {
    next.resize(static_cast<std::size_t>(tower_[l].weight.rows()));
    affine(tower_[l], cur.data(), next.data());
    if (l + 1 < tower_.size())
      for (auto& v : next) v = std::max(v, 0.0);
    cur.swap(next);
  }
  return cur;
}

double SimilarityModel::logit(std::span<const double> emb_a, std::span<const double> emb_b,
                              std::span<const double> distances) const {
  thread_local std::vector<double> cur, next;
  const std::size_t e = arch_.embedding_dim;
  cur.resize(e + distance_scale_.size());
  for (std::size_t k = 0; k < e; ++k) cur[k] = emb_a[k] * emb_b[k];
  for (std::size_t k = 0; k < distance_scale_.size(); ++k) cur[e + k] = distances[k] / distance_scale_[k];
  for (std::size_t l = 0; l < head_.size(); ++l) {
    next.resize(static_cast<std::size_t>(head_[l].weight.rows()));
    affine(head_[l], cur.data(), next.data());
    if (l + 1 < head_.size())
      for (auto& v : next) v = std::max(v, 0.0);
    cur.swap(next);
  }
  return cur[0];
}

double bounded_sigmoid(double logit) {
  const double s = logit >= 0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
  return std::clamp(s, kScoreMargin, 1.0 - kScoreMargin);
}

double SimilarityModel::score(std::span<const double> emb_a, std::span<const double> emb_b,
                              std::span<const double> distances) const {
  return bounded_sigmoid(logit(emb_a, emb_b, distances));
}

double predict(const SimilarityModel& model, const Point& a, const Point& b, const ModalSchema& schema) {
  std::vector<double> dist(schema.size());
  distance_vector_into(a, b, schema, dist);
  std::vector<double> ia, ib;
  for (std::size_t m = 0; m < schema.size(); ++m)
    if (schema[m].kind == ModeKind::dense) {
      ia.insert(ia.end(), a.dense(m).begin(), a.dense(m).end());
      ib.insert(ib.end(), b.dense(m).begin(), b.dense(m).end());
    }
  const auto ea = model.embed(ia);
  const auto eb = model.embed(ib);
  return model.score(ea, eb, dist);
}

ModelScorer::ModelScorer(const SimilarityModel& model, const Dataset& dataset, unsigned threads)
    : model_(&model), dataset_(&dataset), embeddings_(dataset.size()) {
  model.check_schema(dataset.schema());
  parallel_for(dataset.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) embeddings_[i] = model.embed(dataset.dense_input(i));
  });
}

double ModelScorer::operator()(std::size_t i, std::size_t j) const {
  thread_local std::vector<double> dist;
  const auto& schema = dataset_->schema();
  dist.resize(schema.size());
  distance_vector_into((*dataset_)[i], (*dataset_)[j], schema, dist);
  return model_->score(embeddings_[i], embeddings_[j], dist);
}

// ---------------------------------------------------------------------------
// Pair harvesting

namespace {

HarvestedPairs harvest_from(const Dataset& dataset, const PointSplit& split, const std::vector<IndexPair>& pairs) {
  HarvestedPairs out;
  for (auto [i, j] : pairs) {
    const bool train_pair = split.in_train(i) && split.in_train(j);
    const bool holdout_pair = split.in_holdout(i) && split.in_holdout(j);
    const auto label = oracle_same_class(dataset[i], dataset[j]);
    if (!label) {
      ++out.undecided;
      continue;
    }
    if (!train_pair && !holdout_pair) {
      ++out.cross_split;
      continue;
    }
    PairExample ex;
    ex.index_a = i;
    ex.index_b = j;
    ex.id_a = dataset[i].id;
    ex.id_b = dataset[j].id;
    if (ex.id_b < ex.id_a) {
      std::swap(ex.index_a, ex.index_b);
      std::swap(ex.id_a, ex.id_b);
    }
    ex.distances = distance_vector(dataset[ex.index_a], dataset[ex.index_b], dataset.schema());
    ex.label = *label;
    (train_pair ? out.train : out.holdout).push_back(std::move(ex));
  }
  if (out.train.empty() && out.holdout.empty())
    throw Error("no oracle-labelled pairs were harvested; the sketch never co-bucketed labelled points");
  return out;
}

}  // namespace

HarvestedPairs harvest_training_pairs(const Dataset& dataset, const PointSplit& split,
                                      const std::vector<Bucket>& buckets) {
  return harvest_from(dataset, split, candidate_pairs(buckets));
}

HarvestedPairs harvest_all_pairs(const Dataset& dataset, const PointSplit& split) {
  std::vector<std::uint32_t> members;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (split.side[i] != 0) members.push_back(static_cast<std::uint32_t>(i));
  std::vector<IndexPair> pairs;
  if (members.size() > 1) pairs.reserve(members.size() * (members.size() - 1) / 2);
  for (std::size_t x = 0; x < members.size(); ++x)
    for (std::size_t y = x + 1; y < members.size(); ++y)
      // Cross pairs can never be used; skip them up front.
      if (split.side[members[x]] == split.side[members[y]]) pairs.emplace_back(members[x], members[y]);
  return harvest_from(dataset, split, pairs);
}

// ---------------------------------------------------------------------------
// Batched forward / backward

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (l2 < 0.0) throw ConfigError("l2 must be >= 0");
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  TrainConfig t;
  t.learning_rate = cfg.get_double(prefix + "learning_rate", t.learning_rate);
  t.momentum = cfg.get_double(prefix + "momentum", t.momentum);
  t.epochs = static_cast<std::size_t>(cfg.get_int(prefix + "epochs", static_cast<std::int64_t>(t.epochs)));
  t.batch_size =
      static_cast<std::size_t>(cfg.get_int(prefix + "batch_size", static_cast<std::int64_t>(t.batch_size)));
  t.negative_subsample_ratio = cfg.get_double(prefix + "negative_ratio", t.negative_subsample_ratio);
  t.l2 = cfg.get_double(prefix + "l2", t.l2);
  t.validate();
  return t;
}

Gradients Gradients::zeros_like(const SimilarityModel& model) {
  Gradients g;
  for (const auto& l : model.tower())
    g.tower.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  for (const auto& l : model.head())
    g.head.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  return g;
}

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

struct MlpTrace {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer (post-activation of previous)
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  Eigen::MatrixXd output;
};

// Columns are samples. Hidden layers are ReLU, the last layer is linear.
void mlp_forward(const std::vector<DenseLayer>& layers, Eigen::MatrixXd input, MlpTrace& trace) {
  trace.inputs.clear();
  trace.pre.clear();
  Eigen::MatrixXd cur = std::move(input);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * cur;
    z.colwise() += layers[l].bias;
    trace.inputs.push_back(std::move(cur));
    cur = (l + 1 < layers.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    trace.pre.push_back(std::move(z));
  }
  trace.output = std::move(cur);
}

// Accumulates parameter gradients; returns d(loss)/d(input).
Eigen::MatrixXd mlp_backward(const std::vector<DenseLayer>& layers, const MlpTrace& trace, Eigen::MatrixXd d_out,
                             std::vector<DenseLayer>& grads) {
  Eigen::MatrixXd delta = std::move(d_out);
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) delta = delta.cwiseProduct((trace.pre[l].array() > 0.0).cast<double>().matrix());
    grads[l].weight.noalias() += delta * trace.inputs[l].transpose();
    grads[l].bias += delta.rowwise().sum();
    delta = layers[l].weight.transpose() * delta;
  }
  return delta;
}

struct BatchForward {
  std::vector<std::size_t> unique;          // dataset indices with a tower column
  std::vector<Eigen::Index> col_a, col_b;   // per pair column into `unique`
  MlpTrace tower;
  MlpTrace head;
  Eigen::MatrixXd embeddings;               // emb x unique
};

double batch_forward(const SimilarityModel& model, std::span<const PairExample> batch, const Dataset& dataset,
                     BatchForward& fw) {
  const std::size_t e = model.architecture().embedding_dim;
  const auto n = static_cast<Eigen::Index>(batch.size());
  fw.unique.clear();
  fw.col_a.resize(batch.size());
  fw.col_b.resize(batch.size());
  if (e > 0) {
    std::unordered_map<std::size_t, Eigen::Index> column;
    auto col_of = [&](std::size_t idx) {
      auto [it, inserted] = column.emplace(idx, static_cast<Eigen::Index>(fw.unique.size()));
      if (inserted) fw.unique.push_back(idx);
      return it->second;
    };
    for (std::size_t p = 0; p < batch.size(); ++p) {
      fw.col_a[p] = col_of(batch[p].index_a);
      fw.col_b[p] = col_of(batch[p].index_b);
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(model.input_dim()), static_cast<Eigen::Index>(fw.unique.size()));
    for (std::size_t u = 0; u < fw.unique.size(); ++u) {
      const auto& in = dataset.dense_input(fw.unique[u]);
      for (std::size_t k = 0; k < in.size(); ++k)
        x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(u)) =
            (in[k] - model.input_shift()[k]) / model.input_scale()[k];
    }
    mlp_forward(model.tower(), std::move(x), fw.tower);
    fw.embeddings = fw.tower.output;
  }
  const auto d = static_cast<Eigen::Index>(model.distance_count());
  Eigen::MatrixXd h(static_cast<Eigen::Index>(e) + d, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    if (e > 0)
      h.col(p).head(static_cast<Eigen::Index>(e)) =
          fw.embeddings.col(fw.col_a[p]).cwiseProduct(fw.embeddings.col(fw.col_b[p]));
    const auto& dist = batch[p].distances.values;
    for (Eigen::Index k = 0; k < d; ++k)
      h(static_cast<Eigen::Index>(e) + k, p) = dist[k] / model.distance_scale()[k];
  }
  mlp_forward(model.head(), std::move(h), fw.head);
  double loss = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    const double s = fw.head.output(0, p);
    loss += softplus(batch[p].label ? -s : s);
  }
  return loss / static_cast<double>(n);
}

}  // namespace

double loss_and_gradients(const SimilarityModel& model, std::span<const PairExample> batch, const Dataset& dataset,
                          Gradients& grads) {
  if (batch.empty()) throw Error("empty batch");
  grads = Gradients::zeros_like(model);
  BatchForward fw;
  const double loss = batch_forward(model, batch, dataset, fw);
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd d_logit(1, n);
  for (Eigen::Index p = 0; p < n; ++p)
    d_logit(0, p) = (sigmoid(fw.head.output(0, p)) - (batch[p].label ? 1.0 : 0.0)) / static_cast<double>(n);
  const Eigen::MatrixXd d_head_in = mlp_backward(model.head(), fw.head, std::move(d_logit), grads.head);

  const auto e = static_cast<Eigen::Index>(model.architecture().embedding_dim);
  if (e > 0) {
    Eigen::MatrixXd d_emb = Eigen::MatrixXd::Zero(e, static_cast<Eigen::Index>(fw.unique.size()));
    for (Eigen::Index p = 0; p < n; ++p) {
      const auto dz = d_head_in.col(p).head(e);
      d_emb.col(fw.col_a[p]) += dz.cwiseProduct(fw.embeddings.col(fw.col_b[p]));
      d_emb.col(fw.col_b[p]) += dz.cwiseProduct(fw.embeddings.col(fw.col_a[p]));
    }
    mlp_backward(model.tower(), fw.tower, std::move(d_emb), grads.tower);
  }
  return loss;
}

double log_loss(const SimilarityModel& model, std::span<const PairExample> examples, const Dataset& dataset) {
  if (examples.empty()) throw Error("log-loss of an empty example set");
  std::unordered_map<std::size_t, std::vector<double>> emb;
  for (const auto& ex : examples)
    for (auto idx : {ex.index_a, ex.index_b})
      if (!emb.count(idx)) emb.emplace(idx, model.embed(dataset.dense_input(idx)));
  double total = 0.0;
  for (const auto& ex : examples) {
    const double s = model.logit(emb[ex.index_a], emb[ex.index_b], ex.distances.values);
    total += softplus(ex.label ? -s : s);
  }
  return total / static_cast<double>(examples.size());
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const std::vector<PairExample>& examples, const Dataset& dataset, const TrainConfig& config,
                  const Architecture& arch, const std::vector<PairExample>* validation) {
  config.validate();
  if (examples.empty()) throw Error("no training examples");
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 0; k < examples.size(); ++k) (examples[k].label ? pos : neg).push_back(k);
  if (pos.empty() || neg.empty()) throw Error("training examples carry a single label; need both classes");

  TrainResult result;
  SimilarityModel& model = result.model;
  model = SimilarityModel::initialize(dataset.schema(), arch, derive_seed(config.seed, "model"));

  // Distances enter the head divided by their mean over the training pairs.
  const std::size_t d = dataset.schema().size();
  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0;
    for (const auto& ex : examples) sum += ex.distances.values.at(k);
    const double mean = sum / static_cast<double>(examples.size());
    model.distance_scale()[k] = mean > 0.0 ? mean : 1.0;
  }

  // Dense columns are centred on the mean of the points the training pairs
  // touch. Each dense mode is then divided by one spread shared by its
  // columns, so relative feature scales inside a mode survive.
  if (model.input_dim() > 0) {
    std::vector<char> seen(dataset.size(), 0);
    for (const auto& ex : examples) seen[ex.index_a] = seen[ex.index_b] = 1;
    const std::size_t w = model.input_dim();
    std::vector<double> sum(w, 0.0), sq(w, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (!seen[i]) continue;
      const auto& in = dataset.dense_input(i);
      for (std::size_t k = 0; k < w; ++k) {
        sum[k] += in[k];
        sq[k] += in[k] * in[k];
      }
      ++count;
    }
    std::size_t col = 0;
    for (const auto& mode : dataset.schema().modes()) {
      if (mode.kind != ModeKind::dense) continue;
      double var = 0.0;
      for (std::size_t k = col; k < col + mode.dim; ++k) {
        const double mean = sum[k] / static_cast<double>(count);
        model.input_shift()[k] = mean;
        var += std::max(0.0, sq[k] / static_cast<double>(count) - mean * mean);
      }
      var /= static_cast<double>(mode.dim);
      const double spread = var > 1e-24 ? std::sqrt(var) : 1.0;
      for (std::size_t k = col; k < col + mode.dim; ++k) model.input_scale()[k] = spread;
      col += mode.dim;
    }
  }

  result.initial_loss = log_loss(model, examples, dataset);
  Rng rng = make_rng(config.seed, "train_batches");
  Gradients velocity = Gradients::zeros_like(model);
  Gradients grads;
  std::vector<PairExample> batch;
  batch.reserve(config.batch_size);
  std::optional<SimilarityModel> best;
  double best_validation = 0.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order = pos;
    if (config.negative_subsample_ratio > 0.0 &&
        static_cast<double>(neg.size()) > config.negative_subsample_ratio * static_cast<double>(pos.size())) {
      const auto keep = static_cast<std::size_t>(
          std::llround(config.negative_subsample_ratio * static_cast<double>(pos.size())));
      std::vector<std::size_t> shuffled = neg;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      order.insert(order.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(keep));
    } else {
      order.insert(order.end(), neg.begin(), neg.end());
    }
    std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t t = start; t < end; ++t) batch.push_back(examples[order[t]]);
      const double loss = loss_and_gradients(model, batch, dataset, grads);
      if (!std::isfinite(loss)) throw TrainingError(epoch, "loss became non-finite");

      auto step = [&](auto& param, auto& vel, auto& grad, bool is_weight) {
        if (is_weight && config.l2 > 0.0) grad += config.l2 * param;
        vel = config.momentum * vel - config.learning_rate * grad;
        param += vel;
      };
      for (std::size_t l = 0; l < model.tower().size(); ++l) {
        step(model.tower()[l].weight, velocity.tower[l].weight, grads.tower[l].weight, true);
        step(model.tower()[l].bias, velocity.tower[l].bias, grads.tower[l].bias, false);
      }
      for (std::size_t l = 0; l < model.head().size(); ++l) {
        step(model.head()[l].weight, velocity.head[l].weight, grads.head[l].weight, true);
        step(model.head()[l].bias, velocity.head[l].bias, grads.head[l].bias, false);
      }
    }
    const double epoch_loss = log_loss(model, examples, dataset);
    if (!std::isfinite(epoch_loss)) throw TrainingError(epoch, "loss became non-finite");
    result.epoch_losses.push_back(epoch_loss);
    if (validation && !validation->empty()) {
      const double v = log_loss(model, *validation, dataset);
      result.validation_losses.push_back(v);
      if (!best || v < best_validation) {
        best_validation = v;
        best = model;
        result.selected_epoch = epoch;
      }
    }
  }
  if (best) model = std::move(*best);
  return result;
}

// ---------------------------------------------------------------------------
// Gradient check

double gradient_check(const SimilarityModel& model, std::span<const PairExample> batch, const Dataset& dataset,
                      const GradientFn& analytic, double step) {
  if (batch.empty()) throw Error("gradient check needs a non-empty batch");
  Gradients grads;
  analytic(model, batch, dataset, grads);

  SimilarityModel probe = model;
  BatchForward fw;
  double worst = 0.0;
  auto check = [&](auto& param, const auto& grad) {
    for (Eigen::Index k = 0; k < param.size(); ++k) {
      const double saved = param.data()[k];
      param.data()[k] = saved + step;
      const double up = batch_forward(probe, batch, dataset, fw);
      param.data()[k] = saved - step;
      const double down = batch_forward(probe, batch, dataset, fw);
      param.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grad.data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  };
  for (std::size_t l = 0; l < probe.tower().size(); ++l) {
    check(probe.tower()[l].weight, grads.tower.at(l).weight);
    check(probe.tower()[l].bias, grads.tower.at(l).bias);
  }
  for (std::size_t l = 0; l < probe.head().size(); ++l) {
    check(probe.head()[l].weight, grads.head.at(l).weight);
    check(probe.head()[l].bias, grads.head.at(l).bias);
  }
  return worst;
}

}  // namespace graphforge
