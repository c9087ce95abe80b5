#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "graphforge/error.hpp"
#include "graphforge/random.hpp"
#include "graphforge/synthetic.hpp"
#include "run_config.hpp"
#include "test_support.hpp"

using namespace graphforge;
using namespace graphforge::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// A workspace with a clustered two-mode dataset and a config file.
class Workspace {
 public:
  explicit Workspace(std::size_t clusters = 6, std::size_t per_cluster = 30) : dir_("cli") {
    synthetic::ClusteredConfig sc;
    sc.clusters = clusters;
    sc.points_per_cluster = per_cluster;
    sc.dense_dim = 6;
    sc.seed = 4;
    const auto d = synthetic::make_clustered(sc);
    save_dataset(dir_ / "data.tsv", d);
    save_schema(dir_ / "schema.txt", SchemaDocument{d.schema(), d.class_count()});
  }

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  std::filesystem::path config(const std::string& name, const std::string& extra) const {
    const std::string base =
        "dataset = data.tsv\nschema = schema.txt\nmodel = model.txt\ngraph = graph.tsv\n"
        "seed = 3\narch.tower_hidden = 8\narch.embedding_dim = 4\narch.head_hidden = 6\ntrain.epochs = 3\n"
        "sketch.functions = 8\nsketch.bucket_cap = 40\nsketch.family.1.mode = tags\nsketch.family.1.kind = minhash\n";
    spit(dir_ / name, base + extra);
    return dir_ / name;
  }

  int run_cmd(Subcommand sub, const std::string& extra, const Overrides& ov = {}, std::string* log = nullptr) const {
    std::ostringstream out;
    const int rc = run(RunConfig::load(sub, config("run.cfg", extra), ov), out);
    if (log) *log = out.str();
    return rc;
  }

 private:
  gf_test::TempDir dir_;
};

std::size_t log_value(const std::string& log, const std::string& key) {
  std::smatch m;
  if (!std::regex_search(log, m, std::regex(key + "=(\\d+)"))) throw std::runtime_error("missing " + key);
  return std::stoull(m[1]);
}

std::set<std::string> edge_pairs(const std::string& text) {
  std::set<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.insert(line.substr(0, line.rfind('\t')));
  return out;
}

}  // namespace

TEST(Cli, TrainWritesModelAndReport) {
  Workspace ws;
  std::string log;
  EXPECT_EQ(ws.run_cmd(Subcommand::train, "", {}, &log), 0);
  EXPECT_TRUE(std::filesystem::exists(ws.path("model.txt")));
  EXPECT_NE(log.find("holdout_loss"), std::string::npos);
  EXPECT_NE(slurp(ws.path("model.txt.report")).find("holdout_loss"), std::string::npos);
}

TEST(Cli, TrainTwiceIsByteIdentical) {
  Workspace ws;
  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  const auto first = slurp(ws.path("model.txt"));
  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  EXPECT_EQ(first, slurp(ws.path("model.txt")));
  Overrides other;
  other.seed = 4;
  ASSERT_EQ(ws.run_cmd(Subcommand::train, "", other), 0);
  EXPECT_NE(first, slurp(ws.path("model.txt")));
}

TEST(Cli, MissingSchemaNamesThePath) {
  Workspace ws;
  std::filesystem::remove(ws.path("schema.txt"));
  try {
    ws.run_cmd(Subcommand::train, "");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(ws.path("schema.txt").string()), std::string::npos) << e.what();
  }
}

TEST(Cli, RequiredPathsAreChecked) {
  Workspace ws;
  const auto cfg = KeyValueConfig::parse("dataset = d.tsv\nschema = s.txt\n");
  EXPECT_THROW(RunConfig::resolve(Subcommand::train, cfg, ws.path(""), {}), ConfigError);
  EXPECT_THROW(RunConfig::resolve(Subcommand::classify, cfg, ws.path(""), {}), ConfigError);
  const auto ok = RunConfig::resolve(Subcommand::eval, KeyValueConfig::parse("dataset = d.tsv\nschema = s.txt\noutput = r\n"),
                                     ws.path(""), {});
  EXPECT_EQ(ok.dataset_path, ws.path("d.tsv"));
}

TEST(Cli, FlagsOverrideConfigAndSeedsAreDerived) {
  Workspace ws;
  Overrides ov;
  ov.epsilon = 0.25;
  ov.top_k = 5;
  ov.rule = "max_edge";
  ov.threads = 3;
  ov.seed = 11;
  const auto c = RunConfig::load(Subcommand::build, ws.config("o.cfg", "build.epsilon = 0.9\n"), ov);
  EXPECT_EQ(c.build.epsilon, 0.25);
  EXPECT_EQ(c.build.top_k, 5u);
  EXPECT_EQ(c.propagation.rule, Rule::max_edge);
  EXPECT_EQ(c.threads, 3u);
  EXPECT_EQ(c.build.threads, 3u);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.train.seed, derive_seed(11, "train"));
  EXPECT_EQ(c.sketch->seed, derive_seed(11, "sketch"));
  ov.rule = "bogus";
  EXPECT_THROW(RunConfig::load(Subcommand::classify, ws.config("p.cfg", "output = p.tsv\n"), ov), ConfigError);
}

TEST(Cli, BuildReportsComparisonsWithinBound) {
  Workspace ws;
  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  std::string log;
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.epsilon = 0.3\n", {}, &log), 0);
  EXPECT_LE(log_value(log, "comparisons"), log_value(log, "comparison_bound"));
  EXPECT_EQ(log_value(log, "comparison_bound"), 8u * 180u * 40u);
  EXPECT_EQ(log_value(log, "nodes"), 180u);
}

TEST(Cli, AllPairsEdgesContainSketchedEdges) {
  Workspace ws(10, 50);
  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.epsilon = 0.4\n"), 0);
  const auto sketched = edge_pairs(slurp(ws.path("graph.tsv")));
  Overrides all;
  all.all_pairs = true;
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.epsilon = 0.4\n", all), 0);
  const auto full = edge_pairs(slurp(ws.path("graph.tsv")));
  EXPECT_FALSE(sketched.empty());
  for (const auto& e : sketched) EXPECT_TRUE(full.count(e)) << e;
}

TEST(Cli, UntrainedModelAtHighEpsilonBuildsEmptyGraph) {
  Workspace ws;
  const auto doc = load_schema(ws.path("schema.txt"));
  Architecture a;
  a.tower_hidden = {8};
  a.embedding_dim = 4;
  save_model(ws.path("model.txt"), SimilarityModel::initialize(doc.schema, a, 1));
  std::string log;
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.epsilon = 0.999999\n", {}, &log), 0);
  EXPECT_EQ(slurp(ws.path("graph.tsv")), "");
  EXPECT_EQ(log_value(log, "edges"), 0u);
}

TEST(Cli, BuildIsThreadInvariant) {
  Workspace ws;
  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.top_k = 5\n"), 0);
  const auto one = slurp(ws.path("graph.tsv"));
  Overrides ov;
  ov.threads = 4;
  ASSERT_EQ(ws.run_cmd(Subcommand::build, "build.top_k = 5\n", ov), 0);
  EXPECT_EQ(one, slurp(ws.path("graph.tsv")));
}

TEST(Cli, ClassifyRules) {
  gf_test::TempDir dir("classify");
  std::vector<Point> pts{gf_test::dense_point("s", {0.0}, 1), gf_test::dense_point("u", {1.0}),
                         gf_test::dense_point("w", {2.0})};
  const Dataset d(gf_test::dense_schema(1), std::move(pts), 3);
  save_dataset(dir / "data.tsv", d);
  save_schema(dir / "schema.txt", SchemaDocument{d.schema(), 3});
  spit(dir / "graph.tsv", "s\tu\t0.7\n");
  spit(dir / "run.cfg", "dataset = data.tsv\nschema = schema.txt\ngraph = graph.tsv\noutput = pred.tsv\n"
                        "propagation.alpha = 1\npropagation.beta = 0\n");
  auto classify_with = [&](const std::string& rule) {
    Overrides ov;
    ov.rule = rule;
    std::ostringstream log;
    EXPECT_EQ(run(RunConfig::load(Subcommand::classify, dir / "run.cfg", ov), log), 0);
    return slurp(dir / "pred.tsv");
  };
  EXPECT_EQ(classify_with("product_one_shot"), "s\tABSTAIN\t0,0,0\nu\t1\t0,0.7,0\nw\tABSTAIN\t0,0,0\n");
  EXPECT_EQ(classify_with("iterative"),
            "s\t1\t0,1,0\nu\tABSTAIN\t0.333333333,0.333333333,0.333333333\nw\tABSTAIN\t0.333333333,0.333333333,0.333333333\n");

  // No seeds at all: max-edge scores everything 0.
  std::vector<Point> bare{gf_test::dense_point("s", {0.0}), gf_test::dense_point("u", {1.0}),
                          gf_test::dense_point("w", {2.0})};
  save_dataset(dir / "data.tsv", Dataset(gf_test::dense_schema(1), std::move(bare), 3));
  EXPECT_EQ(classify_with("max_edge"), "s\tABSTAIN\t0,0,0\nu\tABSTAIN\t0,0,0\nw\tABSTAIN\t0,0,0\n");
}

TEST(Cli, EvalAndAuditAreDeterministic) {
  Workspace ws;
  const std::string extra =
      "output = report.txt\nprotocol.label_fraction = 0.2\nprotocol.compute_pr = true\neval.method = both\n"
      "rbf.k_grid = 5,10\nrbf.sigma_grid = 0.5,1\n";
  ASSERT_EQ(ws.run_cmd(Subcommand::eval, extra), 0);
  const auto first = slurp(ws.path("report.txt"));
  EXPECT_NE(first.find("method=learned"), std::string::npos);
  EXPECT_NE(first.find("method=rbf_grid"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(ws.path("report.txt.learned.pr.csv")));
  EXPECT_TRUE(std::filesystem::exists(ws.path("report.txt.learned.degrees.csv")));
  Overrides ov;
  ov.threads = 2;
  ASSERT_EQ(ws.run_cmd(Subcommand::eval, extra, ov), 0);
  EXPECT_EQ(first, slurp(ws.path("report.txt")));

  ASSERT_EQ(ws.run_cmd(Subcommand::train, ""), 0);
  ASSERT_EQ(ws.run_cmd(Subcommand::lsh_audit, "output = audit.txt\naudit.sample = 2000\n"), 0);
  const auto audit = slurp(ws.path("audit.txt"));
  EXPECT_NE(audit.find("p_hat"), std::string::npos);
  ASSERT_EQ(ws.run_cmd(Subcommand::lsh_audit, "output = audit.txt\naudit.sample = 2000\n"), 0);
  EXPECT_EQ(audit, slurp(ws.path("audit.txt")));
}
