#include "graphforge/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include "graphforge/error.hpp"
#include "graphforge/parallel.hpp"
#include "graphforge/random.hpp"

namespace graphforge {

std::string_view to_string(HashFamily family) {
  switch (family) {
    case HashFamily::minhash: return "minhash";
    case HashFamily::random_hyperplane: return "hyperplane";
    case HashFamily::p_stable: return "p_stable";
  }
  return "?";
}

namespace {

HashFamily parse_family(const std::string& text) {
  if (text == "minhash") return HashFamily::minhash;
  if (text == "hyperplane" || text == "random_hyperplane" || text == "simhash") return HashFamily::random_hyperplane;
  if (text == "p_stable" || text == "pstable") return HashFamily::p_stable;
  throw ConfigError("unknown hash family '" + text + "'");
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

}  // namespace

void SketchConfig::validate(const ModalSchema& schema) const {
  if (num_functions < 1) throw ConfigError("sketch needs at least one hash function");
  if (bucket_cap < 2) throw ConfigError("bucket cap must be >= 2");
  if (drop_threshold && *drop_threshold < bucket_cap) throw ConfigError("drop threshold must be >= bucket cap");
  if (families.empty()) throw ConfigError("sketch needs at least one hash family");
  for (const auto& f : families) {
    const auto mode = schema.find(f.mode_name);
    if (!mode) throw ConfigError("hash family refers to unknown mode '" + f.mode_name + "'");
    const bool tokens = schema[*mode].kind == ModeKind::token_set;
    if (tokens != (f.family == HashFamily::minhash))
      throw ConfigError("hash family " + std::string(to_string(f.family)) + " does not fit mode '" + f.mode_name +
                        "' (" + std::string(to_string(schema[*mode].kind)) + ")");
    if (f.bits_per_function < 1) throw ConfigError("bits per function must be >= 1");
    if (f.family == HashFamily::p_stable && !(f.width > 0.0)) throw ConfigError("p_stable width must be > 0");
  }
}

SketchConfig SketchConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  SketchConfig out;
  out.num_functions = static_cast<std::size_t>(cfg.get_int(prefix + "functions", 8));
  out.bucket_cap = static_cast<std::size_t>(cfg.get_int(prefix + "bucket_cap", 100));
  if (auto d = cfg.get(prefix + "drop_threshold"); d && !d->empty() && *d != "none")
    out.drop_threshold = static_cast<std::size_t>(parse_int(*d, prefix + "drop_threshold"));
  const auto comp = cfg.get_string(prefix + "composition", "and");
  if (comp == "and")
    out.composition = Composition::and_modes;
  else if (comp == "or")
    out.composition = Composition::or_modes;
  else
    throw ConfigError("unknown composition '" + comp + "' (expected and|or)");
  out.seed = cfg.get_uint(prefix + "seed", 0);
  for (std::size_t i = 1;; ++i) {
    const auto p = prefix + "family." + std::to_string(i) + ".";
    auto mode = cfg.get(p + "mode");
    if (!mode) break;
    HashFamilySpec f;
    f.mode_name = *mode;
    f.family = parse_family(cfg.get_string(p + "kind", "minhash"));
    f.width = cfg.get_double(p + "width", 4.0);
    f.bits_per_function = static_cast<std::size_t>(cfg.get_int(p + "bits", 1));
    out.families.push_back(std::move(f));
  }
  return out;
}

HashFunctionSet HashFunctionSet::sample(const SketchConfig& config, const ModalSchema& schema) {
  config.validate(schema);
  Rng rng = make_rng(config.seed, "hash_functions");
  std::normal_distribution<double> normal(0.0, 1.0);

  auto make_sub = [&](const HashFamilySpec& spec) {
    SubHash h;
    h.mode = *schema.find(spec.mode_name);
    h.family = spec.family;
    h.components = spec.bits_per_function;
    h.width = spec.width;
    if (spec.family == HashFamily::minhash) {
      h.salts.resize(h.components);
      for (auto& s : h.salts) s = rng();
    } else {
      h.dim = schema[h.mode].dim;
      h.projections.resize(h.components * h.dim);
      for (auto& x : h.projections) x = normal(rng);
      if (spec.family == HashFamily::p_stable) {
        std::uniform_real_distribution<double> offset(0.0, spec.width);
        h.offsets.resize(h.components);
        for (auto& o : h.offsets) o = offset(rng);
      }
    }
    return h;
  };

  HashFunctionSet set;
  set.functions_.resize(config.num_functions);
  for (std::size_t k = 0; k < config.num_functions; ++k) {
    auto& fn = set.functions_[k];
    if (config.composition == Composition::and_modes) {
      for (const auto& spec : config.families) fn.parts.push_back(make_sub(spec));
    } else {
      fn.parts.push_back(make_sub(config.families[k % config.families.size()]));
    }
  }
  return set;
}

std::vector<std::size_t> HashFunctionSet::modes_of(std::size_t function) const {
  std::vector<std::size_t> out;
  for (const auto& part : functions_.at(function).parts) out.push_back(part.mode);
  return out;
}

void HashFunctionSet::append_key(const SubHash& h, const Point& p, std::string& out) {
  switch (h.family) {
    case HashFamily::minhash: {
      const auto& hashes = p.tokens(h.mode).hashes();
      for (auto salt : h.salts) {
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (auto t : hashes) best = std::min(best, mix64(t ^ salt));
        put_u64(out, best);
      }
      break;
    }
    case HashFamily::random_hyperplane: {
      const auto& x = p.dense(h.mode);
      unsigned char byte = 0;
      for (std::size_t c = 0; c < h.components; ++c) {
        const double* row = h.projections.data() + c * h.dim;
        double s = 0.0;
        for (std::size_t i = 0; i < h.dim; ++i) s += row[i] * x[i];
        if (s >= 0.0) byte |= static_cast<unsigned char>(1u << (c % 8));
        if (c % 8 == 7 || c + 1 == h.components) {
          out.push_back(static_cast<char>(byte));
          byte = 0;
        }
      }
      break;
    }
    case HashFamily::p_stable: {
      const auto& x = p.dense(h.mode);
      for (std::size_t c = 0; c < h.components; ++c) {
        const double* row = h.projections.data() + c * h.dim;
        double s = 0.0;
        for (std::size_t i = 0; i < h.dim; ++i) s += row[i] * x[i];
        const auto cell = static_cast<std::int64_t>(std::floor((s + h.offsets[c]) / h.width));
        put_u64(out, static_cast<std::uint64_t>(cell));
      }
      break;
    }
  }
}

std::string HashFunctionSet::key(std::size_t function, const Point& p) const {
  std::string out;
  for (const auto& part : functions_.at(function).parts) append_key(part, p, out);
  return out;
}

std::vector<std::pair<std::size_t, std::string>> HashFunctionSet::hash_point(const Point& p) const {
  std::vector<std::pair<std::size_t, std::string>> out;
  out.reserve(functions_.size());
  for (std::size_t k = 0; k < functions_.size(); ++k) out.emplace_back(k, key(k, p));
  return out;
}

std::vector<Bucket> nn_sketching(const Dataset& dataset, const SketchConfig& config, unsigned threads,
                                 SketchStats* stats) {
  return nn_sketching(dataset, config, HashFunctionSet::sample(config, dataset.schema()), threads, stats);
}

std::vector<Bucket> nn_sketching(const Dataset& dataset, const SketchConfig& config,
                                 const HashFunctionSet& functions, unsigned threads, SketchStats* stats) {
  config.validate(dataset.schema());
  const std::size_t n = dataset.size();
  const std::size_t s = functions.size();

  struct Sketch {
    std::string key;  // function prefix + key bytes
    std::uint32_t point;
  };
  std::vector<Sketch> sketches(n * s);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t k = 0; k < s; ++k) {
        std::string key;
        key.push_back(static_cast<char>((k >> 24) & 0xff));
        key.push_back(static_cast<char>((k >> 16) & 0xff));
        key.push_back(static_cast<char>((k >> 8) & 0xff));
        key.push_back(static_cast<char>(k & 0xff));
        key += functions.key(k, dataset[i]);
        sketches[i * s + k] = Sketch{std::move(key), static_cast<std::uint32_t>(i)};
      }
  });
  std::sort(sketches.begin(), sketches.end(),
            [](const Sketch& a, const Sketch& b) { return std::tie(a.key, a.point) < std::tie(b.key, b.point); });

  SketchStats local;
  local.sketches = sketches.size();
  const auto subdivide_seed = derive_seed(config.seed, "subdivide");
  std::vector<Bucket> buckets;
  for (std::size_t lo = 0; lo < sketches.size();) {
    std::size_t hi = lo + 1;
    while (hi < sketches.size() && sketches[hi].key == sketches[lo].key) ++hi;
    ++local.raw_groups;
    const std::size_t size = hi - lo;
    std::vector<std::size_t> members;
    members.reserve(size);
    for (std::size_t t = lo; t < hi; ++t) members.push_back(sketches[t].point);
    const std::string& key = sketches[lo].key;
    lo = hi;

    if (size < 2) continue;
    if (config.drop_threshold && size > *config.drop_threshold) {
      ++local.dropped_groups;
      continue;
    }
    if (size <= config.bucket_cap) {
      buckets.push_back(Bucket{key, std::move(members)});
      continue;
    }
    ++local.subdivided_groups;
    Rng rng(mix64(subdivide_seed ^ fnv1a(key)));
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t parts = (size + config.bucket_cap - 1) / config.bucket_cap;
    for (std::size_t part = 0; part < parts; ++part) {
      const std::size_t b = size * part / parts;
      const std::size_t e = size * (part + 1) / parts;
      if (e - b < 2) continue;
      std::vector<std::size_t> chunk(members.begin() + static_cast<std::ptrdiff_t>(b),
                                     members.begin() + static_cast<std::ptrdiff_t>(e));
      std::sort(chunk.begin(), chunk.end());
      buckets.push_back(Bucket{key, std::move(chunk)});
    }
  }
  if (stats) *stats = local;
  return buckets;
}

std::vector<IndexPair> candidate_pairs(const std::vector<Bucket>& buckets, std::size_t* raw_pairs) {
  std::vector<IndexPair> pairs;
  std::size_t total = 0;
  for (const auto& b : buckets) total += b.members.size() * (b.members.size() - 1) / 2;
  pairs.reserve(total);
  for (const auto& b : buckets)
    for (std::size_t x = 0; x < b.members.size(); ++x)
      for (std::size_t y = x + 1; y < b.members.size(); ++y) {
        auto i = static_cast<std::uint32_t>(b.members[x]);
        auto j = static_cast<std::uint32_t>(b.members[y]);
        if (i > j) std::swap(i, j);
        if (i != j) pairs.emplace_back(i, j);
      }
  if (raw_pairs) *raw_pairs = total;
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::size_t comparison_bound(const SketchConfig& config, std::size_t points) {
  return config.num_functions * points * config.bucket_cap;
}

void write_buckets(std::ostream& out, const std::vector<Bucket>& buckets, const Dataset& dataset) {
  static constexpr char hex[] = "0123456789abcdef";
  for (const auto& b : buckets) {
    for (unsigned char c : b.hash_key) out << hex[c >> 4] << hex[c & 0xf];
    out << '\t';
    for (std::size_t k = 0; k < b.members.size(); ++k) out << (k ? "," : "") << dataset[b.members[k]].id;
    out << '\n';
  }
}

SensitivityReport measure_sensitivity(const Dataset& dataset, const SketchConfig& config, const PairScorer& scorer,
                                      double r, double cr, std::size_t sample, std::uint64_t seed,
                                      unsigned threads) {
  if (r < cr) throw ConfigError("strong-tie threshold r must be >= weak-tie threshold cr");
  const auto buckets = nn_sketching(dataset, config, threads);
  const auto pairs = candidate_pairs(buckets);
  if (pairs.empty()) throw Error("sketch produced no candidate pairs");

  auto fractions = [&](const std::vector<IndexPair>& ps) {
    std::vector<double> scores(ps.size());
    parallel_for(ps.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t t = b; t < e; ++t) scores[t] = scorer(ps[t].first, ps[t].second);
    });
    std::size_t strong = 0, weak = 0;
    for (double g : scores) {
      strong += g >= r;
      weak += g < cr;
    }
    const auto n = static_cast<double>(ps.size());
    return std::pair{static_cast<double>(strong) / n, static_cast<double>(weak) / n};
  };

  SensitivityReport report;
  report.r = r;
  report.cr = cr;
  report.candidate_pairs = pairs.size();
  std::tie(report.p_hat, report.q_hat) = fractions(pairs);

  if (sample > 0 && dataset.size() >= 2) {
    Rng rng = make_rng(seed, "sensitivity_baseline");
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(dataset.size() - 1));
    std::vector<IndexPair> random_pairs;
    random_pairs.reserve(sample);
    while (random_pairs.size() < sample) {
      auto i = pick(rng), j = pick(rng);
      if (i == j) continue;
      random_pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    report.sample_count = sample;
    std::tie(report.baseline_p, report.baseline_q) = fractions(random_pairs);
  }
  return report;
}

}  // namespace graphforge
