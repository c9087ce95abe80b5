#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "graphforge/dataset.hpp"
#include "graphforge/error.hpp"
#include "test_support.hpp"

using namespace graphforge;

namespace {

ModalSchema two_dense() {
  return ModalSchema({{"a", ModeKind::dense, 2, Metric::euclidean}, {"b", ModeKind::dense, 3, Metric::cosine}});
}

Dataset parse(const std::string& text, const ModalSchema& schema, std::optional<std::size_t> classes = std::nullopt) {
  std::istringstream in(text);
  return parse_dataset(in, schema, classes, "mem");
}

Dataset labelled(std::size_t per_class, std::size_t classes) {
  std::vector<Point> pts;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t k = 0; k < per_class; ++k)
      pts.push_back(gf_test::dense_point("c" + std::to_string(c) + "_" + std::to_string(k),
                                         {double(c), double(k)}, c));
  return Dataset(gf_test::dense_schema(2), std::move(pts), classes);
}

}  // namespace

TEST(LoadDataset, ThreeRowsTwoDenseModes) {
  const auto d = parse("p1\t0\t1,2\t1,0,0\np2\t-\t3,4\t0,1,0\np3\t1\t5,6\t0,0,1\n", two_dense());
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.schema().size(), 2u);
  EXPECT_EQ(d[0].id, "p1");
  EXPECT_EQ(d[1].id, "p2");
  EXPECT_FALSE(d[1].labeled());
  EXPECT_EQ(d.labeled_count(), 2u);
  EXPECT_EQ(d.class_count(), 2u);
  EXPECT_EQ(d[2].dense(1), (std::vector<double>{0, 0, 1}));
}

TEST(LoadDataset, DuplicateIdIsAnError) {
  try {
    parse("a\t0\t1,2\t1,0,0\na\t0\t1,2\t1,0,0\n", two_dense());
    FAIL() << "expected a duplicate-id error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(LoadDataset, DimMismatchReportsLine) {
  const ModalSchema schema({{"pixels", ModeKind::dense, 256, Metric::euclidean}});
  std::string ok = "ok\t0\t";
  std::string bad = "bad\t1\t";
  for (int i = 0; i < 256; ++i) ok += (i ? ",0" : "0");
  for (int i = 0; i < 255; ++i) bad += (i ? ",0" : "0");
  try {
    parse(ok + "\n" + bad + "\n", schema);
    FAIL() << "expected a dim-mismatch error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("dim"), std::string::npos);
  }
}

TEST(LoadDataset, LabelOutOfRangeAndMalformedRows) {
  EXPECT_THROW(parse("a\t3\t1,2\t1,0,0\n", two_dense(), 3), ParseError);
  EXPECT_THROW(parse("a\t0\t1,2\n", two_dense()), ParseError);
  EXPECT_THROW(parse("a\t0\t1,x\t1,0,0\n", two_dense()), ParseError);
}

TEST(LoadDataset, MissingFileNamesPath) {
  try {
    load_dataset("/nonexistent/points.tsv", two_dense());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/points.tsv"), std::string::npos);
  }
}

TEST(LoadDataset, SaveReloadRoundTrip) {
  const ModalSchema schema({{"v", ModeKind::dense, 3, Metric::euclidean}, {"t", ModeKind::token_set, 0, Metric::jaccard}});
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  std::vector<Point> pts;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v{normal(rng), normal(rng) * 1e-7, normal(rng) * 1e9};
    std::vector<std::string> toks{"tok" + std::to_string(i % 7), "w" + std::to_string(i % 3)};
    std::optional<std::size_t> label;
    if (i % 4) label = std::size_t(i % 3);
    pts.push_back({"id" + std::to_string(i), {Payload(v), Payload(TokenSet(toks))}, label});
  }
  const Dataset d(schema, pts, 3);
  std::stringstream buf;
  save_dataset(buf, d);
  const auto again = parse_dataset(buf, schema, 3, "mem");
  ASSERT_EQ(again.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(again[i], d[i]);
}

TEST(Schema, ParseAndValidate) {
  const auto doc = parse_schema("classes=10\nmode.1.name=pixels\nmode.1.kind=dense:256\nmode.1.metric=euclidean\n"
                                "mode.2.name=tags\nmode.2.kind=tokens\nmode.2.metric=jaccard\n");
  EXPECT_EQ(doc.class_count, 10u);
  ASSERT_EQ(doc.schema.size(), 2u);
  EXPECT_EQ(doc.schema[0].dim, 256u);
  EXPECT_EQ(doc.schema[1].kind, ModeKind::token_set);
  EXPECT_EQ(parse_schema(doc.schema.to_text()).schema, doc.schema);
  EXPECT_THROW(ModalSchema(std::vector<ModeSpec>{}), ConfigError);
  EXPECT_THROW(ModalSchema({{"a", ModeKind::dense, 0, Metric::euclidean}}), ConfigError);
  EXPECT_THROW(ModalSchema({{"a", ModeKind::dense, 2, Metric::euclidean}, {"a", ModeKind::dense, 2, Metric::cosine}}),
               ConfigError);
  EXPECT_THROW(ModalSchema({{"a", ModeKind::dense, 2, Metric::jaccard}}), ConfigError);
}

TEST(Oracle, Examples) {
  const auto a = gf_test::dense_point("a", {0}, 2);
  const auto b = gf_test::dense_point("b", {0}, 2);
  const auto c = gf_test::dense_point("c", {0}, 5);
  const auto u = gf_test::dense_point("u", {0});
  EXPECT_EQ(oracle_same_class(a, b), true);
  EXPECT_EQ(oracle_same_class(a, c), false);
  EXPECT_EQ(oracle_same_class(a, u), std::nullopt);
}

TEST(Oracle, Symmetric) {
  std::vector<Point> pts;
  for (int i = 0; i < 12; ++i) {
    std::optional<std::size_t> l;
    if (i % 3) l = std::size_t(i % 4);
    pts.push_back(gf_test::dense_point(std::to_string(i), {0}, l));
  }
  for (const auto& a : pts)
    for (const auto& b : pts) EXPECT_EQ(oracle_same_class(a, b), oracle_same_class(b, a));
}

TEST(SplitPoints, HundredPointsFractionPointTwo) {
  const auto d = labelled(25, 4);
  const auto s = split_points(d, 0.2, 7);
  EXPECT_EQ(s.holdout.size(), 20u);
  EXPECT_EQ(s.train.size(), 80u);
  std::set<std::size_t> train(s.train.begin(), s.train.end());
  for (auto h : s.holdout) EXPECT_FALSE(train.count(h));
}

TEST(SplitPoints, Deterministic) {
  const auto d = labelled(25, 4);
  const auto a = split_points(d, 0.2, 7);
  const auto b = split_points(d, 0.2, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.holdout, b.holdout);
  const auto c = split_points(d, 0.2, 8);
  EXPECT_NE(a.holdout, c.holdout);
}

TEST(SplitPoints, SingleClassHalfSplit) {
  const auto d = labelled(10, 1);
  const auto s = split_points(d, 0.5, 1);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.holdout.size(), 5u);
}

TEST(SplitPoints, StratifiedEveryClassOnBothSides) {
  const auto d = labelled(7, 6);
  const auto s = split_points(d, 0.1, 3);
  std::set<std::size_t> tr, ho;
  for (auto i : s.train) tr.insert(*d[i].label);
  for (auto i : s.holdout) ho.insert(*d[i].label);
  EXPECT_EQ(tr.size(), 6u);
  EXPECT_EQ(ho.size(), 6u);
}

TEST(SplitPoints, SingletonClassWarnsAndGoesToTrain) {
  std::vector<Point> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(gf_test::dense_point("a" + std::to_string(i), {0}, 0));
  pts.push_back(gf_test::dense_point("lonely", {0}, 1));
  const Dataset d(gf_test::dense_schema(1), pts, 2);
  const auto s = split_points(d, 0.5, 1);
  EXPECT_EQ(s.warnings.size(), 1u);
  EXPECT_TRUE(s.in_train(6));
  EXPECT_THROW(split_points(d, 0.0, 1), ConfigError);
  EXPECT_THROW(split_points(d, 1.0, 1), ConfigError);
}

TEST(SplitPoints, LeakFreedomExhaustive) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto d = labelled(3 + seed % 9, 1 + seed % 5);
    for (double f : {0.1, 0.3, 0.5, 0.9}) {
      const auto s = split_points(d, f, seed);
      std::vector<int> count(d.size(), 0);
      for (auto i : s.train) ++count[i];
      for (auto i : s.holdout) ++count[i];
      for (std::size_t i = 0; i < d.size(); ++i) ASSERT_EQ(count[i], 1) << "point " << i;
    }
  }
}

TEST(MaskLabels, KeepsOnlySelected) {
  const auto d = labelled(3, 2);
  std::vector<bool> keep(d.size(), false);
  keep[1] = true;
  const auto m = mask_labels(d, keep);
  EXPECT_EQ(m.labeled_count(), 1u);
  EXPECT_EQ(m[1].label, d[1].label);
  EXPECT_EQ(m.class_count(), d.class_count());
}
