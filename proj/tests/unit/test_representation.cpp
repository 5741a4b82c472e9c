#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "dmpred/embeddings.hpp"
#include "dmpred/representation.hpp"
#include "fixtures.hpp"

namespace dmpred {
namespace {

std::vector<std::string> ids10() {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("r" + std::to_string(i));
  return ids;
}

PrefixExample example(const std::vector<int>& decisions, const std::vector<int>& suffix) {
  PrefixExample e;
  e.pair_id = "p";
  e.prefix_size = static_cast<int>(decisions.size());
  e.shown_reviews = ids10();
  for (int d : decisions) {
    e.prefix_decisions.push_back(decision_of(d));
    e.prefix_scores.push_back(Score::from_tenths(90));
  }
  e.suffix_labels = suffix;
  double s = 0;
  for (int l : suffix) s += l;
  e.choice_rate = s / static_cast<double>(suffix.size());
  return e;
}

HCTable hc_with_feature1(const std::vector<int>& on) {
  HCTable t;
  const auto ids = ids10();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    HCFeatureVector v;
    v.set(17);
    v.set(34);
    v.set(41);
    v.set(1, on[i] != 0);
    t[ids[i]] = v;
  }
  return t;
}

FeatureBank hc_bank(const HCTable& hc) {
  const auto ids = ids10();
  return FeatureBank::build(TextualSource::Hc, ids, &hc, nullptr, nullptr);
}

TEST(Embeddings, LoadsThreeRows) {
  const auto dir = testing::scratch_dir("emb3");
  std::ofstream(dir / "e.csv") << "review_id,4\na,1,2,3,4\nb,0,0,0,0\nc,-1,0.5,2e-3,7\n";
  const auto t = load_embeddings(dir / "e.csv");
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_DOUBLE_EQ(t.at("c")[2], 2e-3);
}

TEST(Embeddings, RaggedRowsRejected) {
  const auto dir = testing::scratch_dir("emb_ragged");
  std::ofstream(dir / "e.csv") << "review_id,dim\na,1,2,3,4\nb,1,2,3,4,5\n";
  EXPECT_THROW(load_embeddings(dir / "e.csv"), ParseError);
  EmbeddingTable t(4);
  EXPECT_THROW(t.add("x", {1, 2, 3, 4, 5}), ValidationError);
}

TEST(Embeddings, MissingIdNamed) {
  EmbeddingTable t(2);
  t.add("a", {1, 2});
  try {
    t.at("zz-17");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("zz-17"), std::string::npos);
  }
}

TEST(Embeddings, SaveLoadRoundTrip) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  EmbeddingTable t(5);
  for (int i = 0; i < 6; ++i) t.add("id" + std::to_string(i), {n(rng), n(rng), n(rng), n(rng), n(rng)});
  const auto dir = testing::scratch_dir("emb_rt");
  save_embeddings(t, dir / "e.csv");
  const auto back = load_embeddings(dir / "e.csv");
  ASSERT_EQ(back.ids(), t.ids());
  for (const auto& id : t.ids())
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(back.at(id)[k], t.at(id)[k], 1e-8 * (1 + std::abs(t.at(id)[k])));
}

TEST(Standardizer, ZeroMeanUnitVariance) {
  EmbeddingTable t(2);
  t.add("a", {1, 5});
  t.add("b", {3, 5});
  t.add("c", {5, 5});
  const std::vector<std::string> ids = {"a", "b", "c"};
  const auto s = Standardizer::fit(t, ids);
  const auto za = s.apply(t.at("a"));
  const auto zc = s.apply(t.at("c"));
  EXPECT_NEAR(za[0] + zc[0], 0.0, 1e-12);
  EXPECT_NEAR(za[0] * za[0] + zc[0] * zc[0], 3.0, 1e-12);  // population sd
  EXPECT_EQ(za[1], 0.0);
}

TEST(SvmRepresentation, PrefixBehaviorWeights) {
  const auto hc = hc_with_feature1({0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto bank = hc_bank(hc);
  const auto v = svm_representation(example({1, 1, 0, 1}, {1, 1, 1, 1, 1, 1}), bank, true);
  ASSERT_EQ(v.size(), svm_dim(42, true));
  EXPECT_NEAR(v[0], 0.4304, 1e-12);
}

TEST(SvmRepresentation, PrefixTextWeights) {
  const auto hc = hc_with_feature1({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto v = svm_representation(example({1, 0}, {1, 1, 1, 1, 1, 1, 1, 1}), hc_bank(hc), false);
  ASSERT_EQ(v.size(), 84u);
  EXPECT_NEAR(v[0], 0.405, 1e-12);
}

TEST(SvmRepresentation, EmptyPrefix) {
  const auto hc = hc_with_feature1({1, 1, 0, 0, 1, 0, 0, 0, 0, 1});
  const auto v = svm_representation(example({}, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}), hc_bank(hc), true);
  ASSERT_EQ(v.size(), 8u + 84u);
  for (std::size_t i = 0; i < 8 + 42; ++i) EXPECT_EQ(v[i], 0.0);
  EXPECT_NEAR(v[50], 0.4, 1e-12);            // feature 1 over all ten trials
  EXPECT_NEAR(v[50 + 16], 1.0, 1e-12);       // feature 17 everywhere
}

TEST(SvmRepresentation, SuffixMeanProperty) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<int> on(10);
    for (int& x : on) x = static_cast<int>(rng() % 2);
    const int pr = static_cast<int>(rng() % 10);
    std::vector<int> dec(static_cast<std::size_t>(pr), 1), suf(static_cast<std::size_t>(10 - pr), 0);
    const auto v = svm_representation(example(dec, suf), hc_bank(hc_with_feature1(on)), false);
    double expect = 0;
    for (int t = pr; t < 10; ++t) expect += on[static_cast<std::size_t>(t)];
    EXPECT_NEAR(v[42], expect / (10 - pr), 1e-12);
  }
}

TEST(SequenceRepresentation, Dimensions) {
  EXPECT_EQ(sequence_dim(42, true), 50u);
  EXPECT_EQ(sequence_dim(42 + 768, true), 818u);

  const auto ids = ids10();
  EmbeddingTable emb(768);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (const auto& id : ids) {
    std::vector<double> v(768);
    for (double& x : v) x = n(rng);
    emb.add(id, v);
  }
  const auto hc = hc_with_feature1({1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
  const auto st = Standardizer::fit(emb, ids);
  const auto bank = FeatureBank::build(TextualSource::HcDnn, ids, &hc, &emb, &st);
  const auto seq = sequence_representation(example({1, 0, 1}, {1, 1, 1, 1, 1, 1, 1}), bank, true);
  EXPECT_EQ(seq.dim, 818u);
  EXPECT_EQ(seq.values.size(), 8180u);
}

TEST(SequenceRepresentation, BehaviorOnlyInPrefix) {
  const auto hc = hc_with_feature1({1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  const auto bank = hc_bank(hc);
  const auto zero = sequence_representation(example({}, std::vector<int>(10, 1)), bank, true);
  for (int t = 0; t < 10; ++t)
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(zero.row(t)[k], 0.0);

  const auto seq = sequence_representation(example({1, 0, 1}, std::vector<int>(7, 1)), bank, true);
  EXPECT_EQ(seq.row(0)[0], 1.0);
  EXPECT_EQ(seq.row(1)[0], 0.0);
  EXPECT_EQ(seq.row(1)[BehavioralVector::kStayedCouldEarn], 1.0);
  for (int t = 3; t < 10; ++t)
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(seq.row(t)[k], 0.0);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(seq.row(t)[8], 1.0);
}

TEST(FeatureBank, MissingReviewNamed) {
  auto hc = hc_with_feature1(std::vector<int>(10, 0));
  hc.erase("r7");
  const auto ids = ids10();
  try {
    FeatureBank::build(TextualSource::Hc, ids, &hc, nullptr, nullptr);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("r7"), std::string::npos);
  }
  EXPECT_THROW(FeatureBank::build(TextualSource::Dnn, ids, &hc, nullptr, nullptr), ValidationError);
}

}  // namespace
}  // namespace dmpred
