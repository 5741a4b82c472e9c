#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dmpred/embeddings.hpp"
#include "dmpred/game.hpp"

namespace dmpred::sim {

/// How the scripted expert picks one of the seven reviews.
struct ExpertPolicy {
  enum class Kind { HighestScore, MedianScore, RandomReview, ScoreThreshold };
  Kind kind = Kind::RandomReview;
  double threshold = kHotelCost;  // ScoreThreshold only

  /// "highest", "median", "random", "threshold:<score>".
  static ExpertPolicy parse(std::string_view text);
  std::string str() const;
};

/// How the scripted decision-maker chooses.
///  - AlwaysHotel
///  - FeatureRule(k): Hotel exactly when hand-crafted feature k of the shown
///    review is set (default lexicon)
///  - ProbabilityMatch(p): Hotel with probability p, independently per trial
///  - ReactiveRepeat(s): first decision is a fair coin; afterwards repeat the
///    previous decision with probability s, otherwise switch
struct DmPolicy {
  enum class Kind { AlwaysHotel, FeatureRule, ProbabilityMatch, ReactiveRepeat };
  Kind kind = Kind::ProbabilityMatch;
  int feature = 13;
  double base_rate = 0.718;
  double stick_prob = 0.85;

  /// "always-hotel", "feature:<k>", "match:<p>", "repeat:<s>".
  static DmPolicy parse(std::string_view text);
  std::string str() const;
  void validate() const;
};

struct SimConfig {
  int n_pairs = 60;
  std::uint64_t seed = 0;
  ExpertPolicy expert;
  DmPolicy dm;
  SplitTag split = SplitTag::TrainValidation;
  /// Exactly ten hotels; empty means the builtin hotels of `split`.
  std::vector<Hotel> hotels;
  /// Pair ids are <prefix><index, 4 digits>; empty picks "tv" / "te" by split.
  std::string pair_prefix;

  void validate() const;
};

/// The score multisets of the ten hotels of each split, ascending.
std::vector<std::vector<Score>> builtin_score_sets(SplitTag split);

/// Builtin hotels with synthetic two-part reviews assembled from the default
/// lexicon; sentiment strength and part lengths track the review score.
std::vector<Hotel> builtin_hotels(SplitTag split = SplitTag::TrainValidation);

/// Independent RNG stream for one game.
std::mt19937_64 game_rng(std::uint64_t seed, std::uint64_t pair_index);

/// One game; `hotels` must be the ten hotels the games are played on.
GameRecord simulate_game(const SimConfig& config, const std::vector<Hotel>& hotels, int pair_index);
GameRecord simulate_game(const SimConfig& config, int pair_index);

Dataset generate_dataset(const SimConfig& config, int jobs = 1);

/// Stand-in for encoder vectors: a fixed random projection of each review's
/// hand-crafted features plus Gaussian noise, so the vectors carry signal.
EmbeddingTable simulated_embeddings(const std::vector<Hotel>& hotels, std::size_t dim, std::uint64_t seed);

}  // namespace dmpred::sim
