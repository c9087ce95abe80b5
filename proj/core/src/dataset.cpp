#include "graphforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "graphforge/config.hpp"
#include "graphforge/error.hpp"
#include "graphforge/random.hpp"

namespace graphforge {

std::string_view to_string(ModeKind kind) {
  return kind == ModeKind::dense ? "dense" : "tokens";
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean: return "euclidean";
    case Metric::cosine: return "cosine";
    case Metric::jaccard: return "jaccard";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  if (text == "euclidean") return Metric::euclidean;
  if (text == "cosine") return Metric::cosine;
  if (text == "jaccard") return Metric::jaccard;
  throw ConfigError("unknown metric '" + std::string(text) + "'");
}

ModalSchema::ModalSchema(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw ConfigError("schema needs at least one mode");
  std::set<std::string> names;
  for (const auto& m : modes_) {
    if (m.name.empty()) throw ConfigError("schema mode with empty name");
    if (!names.insert(m.name).second) throw ConfigError("duplicate mode name '" + m.name + "'");
    if (m.kind == ModeKind::dense) {
      if (m.dim == 0) throw ConfigError("dense mode '" + m.name + "' needs dim >= 1");
      if (m.metric == Metric::jaccard)
        throw ConfigError("mode '" + m.name + "': jaccard needs a token-set mode");
    } else if (m.metric != Metric::jaccard) {
      throw ConfigError("mode '" + m.name + "': token-set modes use the jaccard metric");
    }
  }
}

std::optional<std::size_t> ModalSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].name == name) return i;
  return std::nullopt;
}

std::size_t ModalSchema::dense_width() const {
  std::size_t w = 0;
  for (const auto& m : modes_)
    if (m.kind == ModeKind::dense) w += m.dim;
  return w;
}

std::string ModalSchema::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    const auto prefix = "mode." + std::to_string(i + 1) + ".";
    out += prefix + "name=" + m.name + "\n";
    out += prefix + "kind=" +
           (m.kind == ModeKind::dense ? "dense:" + std::to_string(m.dim) : std::string("tokens")) + "\n";
    out += prefix + "metric=" + std::string(to_string(m.metric)) + "\n";
  }
  return out;
}

std::uint64_t ModalSchema::fingerprint() const { return fnv1a(to_text()); }

SchemaDocument parse_schema(std::string_view text, const std::string& source) {
  const auto cfg = KeyValueConfig::parse(text, source);
  std::vector<ModeSpec> modes;
  for (std::size_t i = 1;; ++i) {
    const auto prefix = "mode." + std::to_string(i) + ".";
    auto name = cfg.get(prefix + "name");
    if (!name) break;
    ModeSpec spec;
    spec.name = *name;
    const auto kind = cfg.get(prefix + "kind");
    if (!kind) throw ConfigError(source + ": missing " + prefix + "kind");
    if (kind->rfind("dense:", 0) == 0) {
      spec.kind = ModeKind::dense;
      const auto dim = parse_int(std::string_view(*kind).substr(6), prefix + "kind");
      if (dim < 1) throw ConfigError(source + ": " + prefix + "kind needs dim >= 1");
      spec.dim = static_cast<std::size_t>(dim);
    } else if (*kind == "tokens" || *kind == "token_set") {
      spec.kind = ModeKind::token_set;
    } else {
      throw ConfigError(source + ": unknown mode kind '" + *kind + "'");
    }
    const auto metric = cfg.get(prefix + "metric");
    spec.metric = metric ? parse_metric(*metric)
                         : (spec.kind == ModeKind::dense ? Metric::euclidean : Metric::jaccard);
    modes.push_back(std::move(spec));
  }
  for (const auto& [key, value] : cfg.entries()) {
    (void)value;
    if (key.rfind("mode.", 0) == 0) {
      const auto idx = parse_int(split(key, '.').at(1), key);
      if (idx < 1 || static_cast<std::size_t>(idx) > modes.size())
        throw ConfigError(source + ": mode numbering must be contiguous from 1 (" + key + ")");
    }
  }
  SchemaDocument doc{ModalSchema(std::move(modes)), std::nullopt};
  if (auto c = cfg.get("classes")) {
    const auto n = parse_int(*c, "classes");
    if (n < 1) throw ConfigError(source + ": classes must be >= 1");
    doc.class_count = static_cast<std::size_t>(n);
  }
  return doc;
}

SchemaDocument load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open schema file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str(), path.string());
}

void save_schema(const std::filesystem::path& path, const SchemaDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  if (doc.class_count) out << "classes=" << *doc.class_count << "\n";
  out << doc.schema.to_text();
}

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  hashes_.reserve(tokens_.size());
  for (const auto& t : tokens_) hashes_.push_back(fnv1a(t));
}

namespace {

void validate_point(const ModalSchema& schema, const Point& p) {
  if (p.id.empty()) throw Error("point with empty id");
  if (p.payloads.size() != schema.size())
    throw Error("point '" + p.id + "' has " + std::to_string(p.payloads.size()) + " modes, schema has " +
                std::to_string(schema.size()));
  for (std::size_t m = 0; m < schema.size(); ++m) {
    const auto& spec = schema[m];
    if (spec.kind == ModeKind::dense) {
      const auto* v = std::get_if<DenseVector>(&p.payloads[m]);
      if (!v) throw Error("point '" + p.id + "' mode '" + spec.name + "' must be dense");
      if (v->size() != spec.dim)
        throw Error("point '" + p.id + "' mode '" + spec.name + "': dim mismatch (got " +
                    std::to_string(v->size()) + ", expected " + std::to_string(spec.dim) + ")");
    } else if (!std::holds_alternative<TokenSet>(p.payloads[m])) {
      throw Error("point '" + p.id + "' mode '" + spec.name + "' must be a token set");
    }
  }
}

}  // namespace

Dataset::Dataset(ModalSchema schema, std::vector<Point> points, std::size_t class_count)
    : schema_(std::move(schema)), points_(std::move(points)), class_count_(class_count) {
  index_.reserve(points_.size());
  dense_inputs_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    validate_point(schema_, p);
    if (!index_.emplace(p.id, i).second) throw Error("duplicate point id '" + p.id + "'");
    if (p.label) {
      if (*p.label >= class_count_)
        throw Error("point '" + p.id + "' label " + std::to_string(*p.label) + " >= class count " +
                    std::to_string(class_count_));
      ++labeled_;
    }
    std::vector<double> input;
    input.reserve(schema_.dense_width());
    for (std::size_t m = 0; m < schema_.size(); ++m)
      if (schema_[m].kind == ModeKind::dense) {
        const auto& v = p.dense(m);
        input.insert(input.end(), v.begin(), v.end());
      }
    dense_inputs_.push_back(std::move(input));
  }
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset parse_dataset(std::istream& in, const ModalSchema& schema,
                      std::optional<std::size_t> class_count, const std::string& source) {
  std::vector<Point> points;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t max_label_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 + schema.size())
      throw ParseError(source, line_no,
                       "expected " + std::to_string(2 + schema.size()) + " tab-separated fields, got " +
                           std::to_string(fields.size()));
    Point p;
    p.id = std::string(fields[0]);
    if (p.id.empty()) throw ParseError(source, line_no, "empty id");
    if (!seen.emplace(p.id, line_no).second)
      throw ParseError(source, line_no, "duplicate id '" + p.id + "'");
    if (fields[1] != "-") {
      std::int64_t label = 0;
      try {
        label = parse_int(fields[1], "label");
      } catch (const Error& e) {
        throw ParseError(source, line_no, e.what());
      }
      if (label < 0) throw ParseError(source, line_no, "negative label");
      if (class_count && static_cast<std::size_t>(label) >= *class_count)
        throw ParseError(source, line_no,
                         "label " + std::to_string(label) + " >= class count " + std::to_string(*class_count));
      p.label = static_cast<std::size_t>(label);
      max_label_plus_one = std::max(max_label_plus_one, *p.label + 1);
    }
    p.payloads.reserve(schema.size());
    for (std::size_t m = 0; m < schema.size(); ++m) {
      const auto field = fields[2 + m];
      const auto& spec = schema[m];
      if (spec.kind == ModeKind::dense) {
        DenseVector v;
        v.reserve(spec.dim);
        const char* cur = field.data();
        const char* end = field.data() + field.size();
        while (cur < end) {
          double x = 0.0;
          auto [ptr, ec] = std::from_chars(cur, end, x);
          if (ec != std::errc() || (ptr != end && *ptr != ','))
            throw ParseError(source, line_no, "bad number in mode '" + spec.name + "'");
          v.push_back(x);
          cur = ptr == end ? end : ptr + 1;
        }
        if (v.size() != spec.dim)
          throw ParseError(source, line_no,
                           "dim mismatch in mode '" + spec.name + "': got " + std::to_string(v.size()) +
                               ", expected " + std::to_string(spec.dim));
        p.payloads.emplace_back(std::move(v));
      } else {
        std::vector<std::string> tokens;
        if (!field.empty())
          for (auto t : split(field, ','))
            if (!t.empty()) tokens.emplace_back(t);
        p.payloads.emplace_back(TokenSet(std::move(tokens)));
      }
    }
    points.push_back(std::move(p));
  }
  return Dataset(schema, std::move(points), class_count.value_or(max_label_plus_one));
}

Dataset load_dataset(const std::filesystem::path& path, const ModalSchema& schema,
                     std::optional<std::size_t> class_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file " + path.string());
  return parse_dataset(in, schema, class_count, path.string());
}

void save_dataset(std::ostream& out, const Dataset& dataset) {
  const auto& schema = dataset.schema();
  for (const auto& p : dataset.points()) {
    out << p.id << '\t';
    if (p.label)
      out << *p.label;
    else
      out << '-';
    for (std::size_t m = 0; m < schema.size(); ++m) {
      out << '\t';
      if (schema[m].kind == ModeKind::dense) {
        const auto& v = p.dense(m);
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << format_exact(v[k]);
      } else {
        const auto& t = p.tokens(m).tokens();
        for (std::size_t k = 0; k < t.size(); ++k) out << (k ? "," : "") << t[k];
      }
    }
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  save_dataset(out, dataset);
}

Dataset mask_labels(const Dataset& dataset, const std::vector<bool>& keep) {
  std::vector<Point> points = dataset.points();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!keep.at(i)) points[i].label.reset();
  return Dataset(dataset.schema(), std::move(points), dataset.class_count());
}

std::optional<bool> oracle_same_class(const Point& a, const Point& b) {
  if (!a.label || !b.label) return std::nullopt;
  return *a.label == *b.label;
}

PointSplit split_points(const Dataset& dataset, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ConfigError("holdout fraction must be in (0, 1)");
  PointSplit split;
  split.side.assign(dataset.size(), 0);

  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset[i].label) by_class[*dataset[i].label].push_back(i);

  std::size_t labeled = 0;
  std::vector<std::size_t> classes;
  for (auto& [c, members] : by_class) {
    labeled += members.size();
    if (members.size() < 2) {
      split.warnings.push_back("class " + std::to_string(c) +
                               " has fewer than 2 labeled points; assigned wholly to train");
      for (auto i : members) split.side[i] = 1;
    } else {
      classes.push_back(c);
    }
  }

  // Largest-remainder allocation of the holdout total across classes, keeping
  // at least one point per class on each side.
  std::size_t lo = classes.size(), hi = 0;
  for (auto c : classes) hi += by_class[c].size() - 1;
  const auto target = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(labeled))), lo, std::max(lo, hi));

  std::vector<std::size_t> quota(classes.size());
  std::vector<double> remainder(classes.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto n = by_class[classes[k]].size();
    const double exact = holdout_fraction * static_cast<double>(n);
    quota[k] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact)), 1, n - 1);
    remainder[k] = exact - static_cast<double>(quota[k]);
    assigned += quota[k];
  }
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  while (assigned < target) {
    bool moved = false;
    for (auto k : order) {
      if (assigned == target) break;
      if (quota[k] + 1 <= by_class[classes[k]].size() - 1) {
        ++quota[k];
        ++assigned;
        moved = true;
      }
    }
    if (!moved) break;
  }
  while (assigned > target) {
    bool moved = false;
    for (auto it = order.rbegin(); it != order.rend() && assigned > target; ++it)
      if (quota[*it] > 1) {
        --quota[*it];
        --assigned;
        moved = true;
      }
    if (!moved) break;
  }

  Rng rng = make_rng(seed, "split_points");
  for (std::size_t k = 0; k < classes.size(); ++k) {
    auto members = by_class[classes[k]];
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r = 0; r < members.size(); ++r) split.side[members[r]] = r < quota[k] ? 2 : 1;
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (split.side[i] == 1) split.train.push_back(i);
    if (split.side[i] == 2) split.holdout.push_back(i);
  }
  return split;
}

}  // namespace graphforge
