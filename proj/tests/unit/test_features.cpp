#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "dmpred/features.hpp"
#include "dmpred/lexicon.hpp"
#include "dmpred/simulator.hpp"
#include "fixtures.hpp"

namespace dmpred {
namespace {

// Feature k (1..42) -> values for texts #1..#4, typed in from the printed table.
const char* const kGold[42] = {
    "0100", "0000", "0001", "1011", "0101", "0001", "0000", "0100", "0100", "0100", "0000", "0000", "0100", "0101",
    "0101", "1101", "0100", "0010", "1001", "0000", "1000", "0000", "0010", "0010", "0000", "1000", "0010", "0001",
    "0100", "0010", "1110", "1110", "1010", "0000", "0101", "1010", "1100", "0010", "0100", "0101", "1010", "0000"};

bool gold(int text, int feature) { return kGold[feature - 1][text - 1] == '1'; }

std::string bits(const std::vector<int>& on) {
  std::vector<int> v(8, 0);
  for (int i : on) v[static_cast<std::size_t>(i)] = 1;
  std::string s;
  for (int b : v) s += static_cast<char>('0' + b);
  return s;
}

std::string str(const BehavioralVector& b) {
  std::string s;
  for (auto x : b.bits) s += static_cast<char>('0' + x);
  return s;
}

TEST(Behavioral, Examples) {
  EXPECT_EQ(str(behavioral_features(Decision::Hotel, 9.2)), bits({0, 3, 6}));
  EXPECT_EQ(str(behavioral_features(Decision::StayHome, 2.5)), bits({1, 5}));
  EXPECT_EQ(str(behavioral_features(Decision::Hotel, 5.8)), bits({0, 4}));
}

TEST(Behavioral, BinBoundaries) {
  EXPECT_EQ(behavioral_features(Decision::StayHome, 3.0)[BehavioralVector::kScore3To5], 1);
  EXPECT_EQ(behavioral_features(Decision::StayHome, 5.0)[BehavioralVector::kScore3To5], 0);
  EXPECT_EQ(behavioral_features(Decision::StayHome, 8.0)[BehavioralVector::kScoreAbove8], 0);
  EXPECT_EQ(behavioral_features(Decision::StayHome, 8.0)[BehavioralVector::kStayedCouldEarn], 1);
  EXPECT_EQ(behavioral_features(Decision::Hotel, 8.0)[BehavioralVector::kChoseEarned], 1);
}

TEST(Behavioral, PropertyExactlyOneOutcomeBit) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto s = Score::from_tenths(25 + static_cast<int>(rng() % 76));
    const auto d = decision_of(static_cast<int>(rng() % 2));
    const auto b = behavioral_features(d, s);
    EXPECT_EQ(b[BehavioralVector::kDecision], label_of(d));
    EXPECT_EQ(b[4] + b[5] + b[6] + b[7], 1);
    EXPECT_LE(b[1] + b[2] + b[3], 1);
  }
}

TEST(HandCrafted, TextFourExamples) {
  const auto reviews = testing::sample_reviews();
  const auto v = hand_crafted_features(reviews[3]);
  EXPECT_TRUE(v.get(28));
  EXPECT_FALSE(v.get(39));
  EXPECT_TRUE(v.get(4));
  // The printed column marks the positive part as long although it has
  // fewer than 200 characters, so only the override reproduces it.
  EXPECT_TRUE(testing::sample_gold().at("sample-r4").get(19));
}

TEST(HandCrafted, TextTwoExamples) {
  const auto v = hand_crafted_features(testing::sample_reviews()[1]);
  EXPECT_TRUE(v.get(29));
  EXPECT_TRUE(v.get(13));
  EXPECT_TRUE(v.get(39));
}

TEST(HandCrafted, EmptyReview) {
  Review r;
  r.review_id = "e";
  r.score = Score::from_tenths(50);
  const auto v = hand_crafted_features(r);
  EXPECT_TRUE(v.get(11));
  EXPECT_TRUE(v.get(28));
  EXPECT_TRUE(v.get(17));
  EXPECT_TRUE(v.get(34));
}

TEST(HandCrafted, LengthBuckets) {
  Review r;
  r.score = Score::from_tenths(80);
  r.positive_text = std::string(99, 'a');
  r.negative_text = std::string(200, 'b');
  auto v = hand_crafted_features(r);
  EXPECT_TRUE(v.get(17));
  EXPECT_TRUE(v.get(36));
  EXPECT_TRUE(v.get(40));  // 99 / 200 < 0.7
  r.positive_text = std::string(100, 'a');
  r.negative_text = std::string(20, 'b');
  v = hand_crafted_features(r);
  EXPECT_TRUE(v.get(18));
  EXPECT_TRUE(v.get(34));
  EXPECT_TRUE(v.get(42));
}

TEST(HandCrafted, PropertyBucketsExclusive) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> words = {"clean", "staff", "dirty", "nothing", "great location", "rude", "."};
  for (int i = 0; i < 300; ++i) {
    Review r;
    r.score = Score::from_tenths(60);
    for (int k = static_cast<int>(rng() % 60); k > 0; --k) r.positive_text += words[rng() % words.size()] + " ";
    for (int k = static_cast<int>(rng() % 60); k > 0; --k) r.negative_text += words[rng() % words.size()] + " ";
    const auto v = hand_crafted_features(r);
    EXPECT_NO_THROW(validate_hc_vector(v));
    EXPECT_EQ(v.get(17) + v.get(18) + v.get(19), 1);
    EXPECT_EQ(v.get(34) + v.get(35) + v.get(36), 1);
    EXPECT_EQ(v.get(40) + v.get(41) + v.get(42), 1);
  }
}

TEST(Overrides, GoldBitExact) {
  const auto table = testing::sample_gold();
  ASSERT_EQ(table.size(), 4u);
  for (int t = 1; t <= 4; ++t)
    for (int f = 1; f <= 42; ++f)
      EXPECT_EQ(table.at("sample-r" + std::to_string(t)).get(f), gold(t, f)) << "text " << t << " feature " << f;
}

TEST(Overrides, WinOverDetectors) {
  sim::SimConfig cfg;
  cfg.n_pairs = 2;
  const auto d = sim::generate_dataset(cfg);
  const auto& target = d.hotels()[2].reviews[5];
  HCTable overrides;
  overrides[target.review_id] = testing::sample_gold().at("sample-r2");
  const auto table = hc_feature_table(d, Lexicon::defaults(), overrides);
  EXPECT_EQ(table.size(), 70u);
  EXPECT_EQ(table.at(target.review_id), overrides.at(target.review_id));
  const auto& other = d.hotels()[3].reviews[0];
  EXPECT_EQ(table.at(other.review_id), hand_crafted_features(other));
}

TEST(Detectors, AgreeWithGoldOnMostCells) {
  const auto reviews = testing::sample_reviews();
  int agree = 0;
  for (int t = 1; t <= 4; ++t) {
    const auto v = hand_crafted_features(reviews[static_cast<std::size_t>(t - 1)]);
    for (int f = 1; f <= 42; ++f) agree += v.get(f) == gold(t, f);
  }
  EXPECT_GE(agree, 135) << agree << " of 168";  // 80%
}

TEST(Overrides, EmptyFileAndBadCell) {
  const auto dir = testing::scratch_dir("overrides");
  std::ofstream(dir / "empty.csv");
  EXPECT_TRUE(load_feature_overrides(dir / "empty.csv").empty());

  std::string header = "review_id";
  std::string row = "x";
  for (int f = 1; f <= 42; ++f) {
    header += ",f" + std::to_string(f);
    row += f == 5 ? ",2" : (f == 17 || f == 34 || f == 41 ? ",1" : ",0");
  }
  std::ofstream(dir / "bad.csv") << header << "\n" << row << "\n";
  EXPECT_THROW(load_feature_overrides(dir / "bad.csv"), ParseError);
}

TEST(Overrides, SaveLoadRoundTrip) {
  const auto table = testing::sample_gold();
  const auto dir = testing::scratch_dir("overrides_rt");
  save_feature_table(table, {"sample-r1", "sample-r2", "sample-r3", "sample-r4"}, dir / "t.csv");
  EXPECT_EQ(load_feature_overrides(dir / "t.csv"), table);
}

TEST(Lexicon, DefaultsRoundTrip) {
  const auto& lex = Lexicon::defaults();
  EXPECT_NO_THROW(lex.validate());
  EXPECT_EQ(Lexicon::parse(lex.serialize()), lex);
  EXPECT_THROW(Lexicon::parse("[no.such.section]\nword\n"), ParseError);
}

TEST(Lexicon, TermMatching) {
  EXPECT_TRUE(contains_term("the view was lovely", "view"));
  EXPECT_FALSE(contains_term("the reviewer", "view"));
  EXPECT_TRUE(contains_term("great views", "view*"));
}

}  // namespace
}  // namespace dmpred
