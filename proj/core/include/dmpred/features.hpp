#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmpred/game.hpp"
#include "dmpred/lexicon.hpp"

namespace dmpred {

/// Outcome encoding of one observed trial:
/// decision, rs < 3, 3 <= rs < 5, rs > 8, cl, nccl, ce, ncce.
struct BehavioralVector {
  enum Index : std::size_t { kDecision, kScoreBelow3, kScore3To5, kScoreAbove8, kChoseLost, kStayedCouldLose,
                             kChoseEarned, kStayedCouldEarn, kSize };
  std::array<std::uint8_t, kSize> bits{};

  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  bool operator==(const BehavioralVector&) const = default;
};

inline constexpr std::size_t kBehavioralDim = BehavioralVector::kSize;
inline constexpr std::size_t kHandCraftedDim = 42;

/// The 42 binary review features, addressed by their 1-based feature number.
class HCFeatureVector {
 public:
  HCFeatureVector() = default;

  bool get(int feature) const { return bits_.test(slot(feature)); }
  void set(int feature, bool on = true) { bits_.set(slot(feature), on); }
  std::array<double, kHandCraftedDim> as_doubles() const;
  /// "0101..." in feature order 1..42.
  std::string str() const;
  std::size_t count() const { return bits_.count(); }

  bool operator==(const HCFeatureVector&) const = default;

 private:
  static std::size_t slot(int feature);
  std::bitset<kHandCraftedDim> bits_;
};

/// Exactly one of 17-19, 34-36, 40-42; feature 11 implies feature 17.
void validate_hc_vector(const HCFeatureVector& v);

BehavioralVector behavioral_features(Decision decision, double random_score);
inline BehavioralVector behavioral_features(Decision decision, Score random_score) {
  return behavioral_features(decision, random_score.value());
}

/// Automatic detectors for the 42 features. Length buckets use character
/// counts of the trimmed parts (< 100, 100-199, >= 200); the positive/negative
/// length ratio uses < 0.7, 0.7-4, > 4 with an empty negative part mapped to
/// the high bucket. A part is "empty" when it has no alphanumeric characters.
HCFeatureVector hand_crafted_features(const Review& review, const Lexicon& lexicon = Lexicon::defaults());

using HCTable = std::unordered_map<std::string, HCFeatureVector>;

/// review_id + f1..f42 with 0/1 cells. An empty file yields an empty table.
HCTable load_feature_overrides(const std::filesystem::path& path);
void save_feature_table(const HCTable& table, const std::vector<std::string>& order,
                        const std::filesystem::path& path);

/// Features for every review; rows present in `overrides` win over the
/// automatic detectors.
HCTable hc_feature_table(const Dataset& dataset, const Lexicon& lexicon, const HCTable& overrides = {});

}  // namespace dmpred
