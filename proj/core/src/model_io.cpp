#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphforge/config.hpp"
#include "graphforge/error.hpp"
#include "graphforge/model.hpp"

namespace graphforge {

namespace {

constexpr std::string_view kMagic = "graphforge-model 2";

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

std::vector<std::size_t> parse_sizes(std::string_view text, const std::string& source, std::size_t line) {
  std::vector<std::size_t> out;
  if (text == "-") return out;
  for (auto part : split(text, ',')) {
    const auto v = parse_int(trim(part), "layer size");
    if (v <= 0) throw ParseError(source, line, "layer sizes must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_layers(std::ostream& out, std::string_view name, const std::vector<DenseLayer>& layers) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    out << "layer " << name << ' ' << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_digits(w(r, c), 17);
      out << '\n';
    }
    for (Eigen::Index r = 0; r < layers[l].bias.size(); ++r)
      out << (r ? " " : "") << format_digits(layers[l].bias[r], 17);
    out << '\n';
  }
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string next(std::string_view what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(source_, line_ + 1, "unexpected end of file, expected " + std::string(what));
    ++line_;
    return line;
  }

  // `key value` header line.
  std::string field(std::string_view key) {
    const auto line = next(key);
    const auto sp = line.find(' ');
    if (sp == std::string::npos || std::string_view(line).substr(0, sp) != key)
      fail("expected '" + std::string(key) + "'");
    return line.substr(sp + 1);
  }

  std::vector<double> numbers(std::size_t count) {
    const auto line = next("numbers");
    std::vector<double> v;
    v.reserve(count);
    for (auto tok : split(line, ' ')) {
      if (tok.empty()) continue;
      try {
        v.push_back(parse_double(tok, "weight"));
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    if (v.size() != count) fail("expected " + std::to_string(count) + " numbers, got " + std::to_string(v.size()));
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::int64_t to_int(LineReader& r, const std::string& text) {
  try {
    return parse_int(text, "integer");
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

DenseLayer read_layer(LineReader& r, std::string_view name, std::size_t index, std::size_t rows, std::size_t cols) {
  const auto header = r.next("layer");
  const std::string expect = "layer " + std::string(name) + ' ' + std::to_string(index) + ' ' +
                             std::to_string(rows) + ' ' + std::to_string(cols);
  if (header != expect) r.fail("expected '" + expect + "'");
  DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(static_cast<Eigen::Index>(rows))};
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = r.numbers(cols);
    for (std::size_t j = 0; j < cols; ++j)
      layer.weight(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  const auto bias = r.numbers(rows);
  for (std::size_t i = 0; i < rows; ++i) layer.bias[static_cast<Eigen::Index>(i)] = bias[i];
  return layer;
}

}  // namespace

void write_model(std::ostream& out, const SimilarityModel& model) {
  const auto& a = model.architecture();
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(model.schema_fingerprint()));
  out << kMagic << '\n';
  out << "schema_hash " << hash << '\n';
  out << "input_dim " << model.input_dim() << '\n';
  out << "distance_features " << model.distance_count() << '\n';
  out << "embedding_dim " << a.embedding_dim << '\n';
  out << "tower_hidden " << join_sizes(a.tower_hidden) << '\n';
  out << "head_hidden " << join_sizes(a.head_hidden) << '\n';
  out << "seed " << model.seed() << '\n';
  out << "distance_scale";
  for (double s : model.distance_scale()) out << ' ' << format_digits(s, 17);
  out << '\n';
  out << "input_shift";
  for (double s : model.input_shift()) out << ' ' << format_digits(s, 17);
  out << '\n';
  out << "input_scale";
  for (double s : model.input_scale()) out << ' ' << format_digits(s, 17);
  out << '\n';
  write_layers(out, "tower", model.tower());
  write_layers(out, "head", model.head());
  out << "end\n";
}

SimilarityModel read_model(std::istream& in, const std::string& source) {
  LineReader r(in, source);
  if (r.next("header") != kMagic) r.fail("not a graphforge model file (bad header)");
  SimilarityModel m;
  const auto hash = r.field("schema_hash");
  try {
    std::size_t used = 0;
    m.schema_fingerprint_ = std::stoull(hash, &used, 16);
    if (used != hash.size()) r.fail("bad schema hash");
  } catch (const std::logic_error&) {
    r.fail("bad schema hash");
  }
  const auto input_dim = to_int(r, r.field("input_dim"));
  const auto d = to_int(r, r.field("distance_features"));
  const auto e = to_int(r, r.field("embedding_dim"));
  if (input_dim < 0 || d < 1 || e < 0) r.fail("bad model dimensions");
  m.input_dim_ = static_cast<std::size_t>(input_dim);
  m.arch_.embedding_dim = static_cast<std::size_t>(e);
  m.arch_.tower_hidden = parse_sizes(r.field("tower_hidden"), source, r.line());
  m.arch_.head_hidden = parse_sizes(r.field("head_hidden"), source, r.line());
  const auto seed_text = r.field("seed");
  try {
    m.seed_ = std::stoull(seed_text);
  } catch (const std::logic_error&) {
    r.fail("bad seed");
  }
  auto read_vector = [&](const std::string& name, std::size_t count, std::vector<double>& into, bool positive) {
    const auto line = r.next(name);
    auto parts = split(line, ' ');
    if (parts.empty() || parts[0] != name || parts.size() != count + 1)
      r.fail("expected " + name + " with " + std::to_string(count) + " values");
    for (std::size_t k = 1; k < parts.size(); ++k) {
      try {
        into.push_back(parse_double(parts[k], name));
      } catch (const Error& err) {
        r.fail(err.what());
      }
      if (positive && !(into.back() > 0.0)) r.fail(name + " values must be positive");
    }
  };
  read_vector("distance_scale", static_cast<std::size_t>(d), m.distance_scale_, true);
  read_vector("input_shift", m.input_dim_, m.input_shift_, false);
  read_vector("input_scale", m.input_dim_, m.input_scale_, true);
  if (m.arch_.embedding_dim > 0) {
    std::size_t in_dim = m.input_dim_;
    std::size_t idx = 0;
    for (auto h : m.arch_.tower_hidden) {
      m.tower_.push_back(read_layer(r, "tower", idx++, h, in_dim));
      in_dim = h;
    }
    m.tower_.push_back(read_layer(r, "tower", idx, m.arch_.embedding_dim, in_dim));
  } else if (!m.arch_.tower_hidden.empty()) {
    r.fail("tower_hidden given without an embedding");
  }
  std::size_t in_dim = m.arch_.embedding_dim + static_cast<std::size_t>(d);
  std::size_t idx = 0;
  for (auto h : m.arch_.head_hidden) {
    m.head_.push_back(read_layer(r, "head", idx++, h, in_dim));
    in_dim = h;
  }
  m.head_.push_back(read_layer(r, "head", idx, 1, in_dim));
  if (r.next("end") != "end") r.fail("expected 'end'");
  return m;
}

void save_model(const std::filesystem::path& path, const SimilarityModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path.string());
  write_model(out, model);
  if (!out) throw Error("error writing model file: " + path.string());
}

SimilarityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path.string());
  return read_model(in, path.string());
}

}  // namespace graphforge
