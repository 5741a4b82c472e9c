#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dmpred {

inline constexpr int kTrialsPerGame = 10;
inline constexpr int kReviewsPerHotel = 7;
inline constexpr double kHotelCost = 8.0;
inline constexpr double kMinScore = 2.5;
inline constexpr double kMaxScore = 10.0;
inline constexpr double kTolerance = 1e-9;

/// Raised when a value or record breaks a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by file readers; the message names the file and row.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A review score with one fractional digit, stored as an exact count of
/// tenths so that membership tests on score multisets never compare floats.
class Score {
 public:
  constexpr Score() = default;

  static constexpr Score from_tenths(int tenths) { return Score(tenths); }
  /// Rounds to the nearest tenth; throws if `value` is further than 1e-9
  /// from a tenth.
  static Score from_double(double value);
  /// Accepts "9.2", "10", "10.0".
  static Score parse(std::string_view text);

  constexpr int tenths() const { return tenths_; }
  constexpr double value() const { return tenths_ / 10.0; }
  /// Always one fractional digit ("10.0", "2.5").
  std::string str() const;

  constexpr auto operator<=>(const Score&) const = default;

 private:
  constexpr explicit Score(int tenths) : tenths_(tenths) {}
  int tenths_ = 0;
};

bool score_in_range(double value);

enum class Decision { StayHome = 0, Hotel = 1 };

constexpr int label_of(Decision d) { return d == Decision::Hotel ? 1 : 0; }
constexpr Decision decision_of(int label) { return label != 0 ? Decision::Hotel : Decision::StayHome; }

enum class SplitTag { TrainValidation, Test };

std::string_view to_string(SplitTag tag);
SplitTag parse_split_tag(std::string_view text);

struct Review {
  std::string review_id;
  std::string hotel_id;
  std::string positive_text;
  std::string negative_text;
  bool positive_shown_first = false;
  Score score;
};

/// Throws ValidationError when the score is out of range or both parts are
/// empty.
void validate_review(const Review& review);

struct Hotel {
  std::string hotel_id;
  std::vector<Review> reviews;

  std::vector<Score> scores() const;
  bool has_score(Score s) const;
  const Review* find_review(std::string_view review_id) const;
};

void validate_hotel(const Hotel& hotel);

struct Trial {
  int index = 0;  // 1..10
  std::string hotel_id;
  std::string shown_review_id;
  Decision decision = Decision::StayHome;
  Score random_score;
  double dm_payoff = 0.0;
  double expert_payoff = 0.0;
};

struct ParticipantInfo {
  std::optional<int> age;
  std::optional<std::string> gender;
};

struct GameRecord {
  std::string pair_id;
  std::vector<Trial> trials;  // ordered by index
  SplitTag split = SplitTag::TrainValidation;
  // Accepted and round-tripped; never used as a model feature.
  ParticipantInfo decision_maker;
};

/// One prefix/suffix view of a game: the first `prefix_size` trials are
/// observed, the remaining ones are prediction targets.
struct PrefixExample {
  std::string pair_id;
  int prefix_size = 0;
  std::vector<std::string> shown_reviews;  // all 10 trials
  std::vector<Decision> prefix_decisions;
  std::vector<Score> prefix_scores;
  std::vector<int> suffix_labels;  // y_TR, 10 - prefix_size entries
  double choice_rate = 0.0;        // mean of suffix_labels

  int suffix_size() const { return kTrialsPerGame - prefix_size; }
  /// 1-based trial number of the k-th suffix element.
  int suffix_trial_index(int k) const { return prefix_size + 1 + k; }
};

double dm_payoff(Decision decision, double random_score);
inline double dm_payoff(Decision decision, Score random_score) {
  return dm_payoff(decision, random_score.value());
}
double expert_payoff(Decision decision);

/// Builds a trial with payoffs computed from the decision and score.
Trial make_trial(int index, std::string hotel_id, std::string shown_review_id, Decision decision,
                 Score random_score);

std::vector<PrefixExample> expand_game(const GameRecord& game);
/// Expands every game, keeping examples with prefix_size >= min_prefix.
std::vector<PrefixExample> expand_games(std::span<const GameRecord> games, int min_prefix = 0);

/// Games plus the review and hotel stores they reference. Built once and
/// read-only afterwards.
class Dataset {
 public:
  /// Validates every cross-reference and game invariant.
  static Dataset build(SplitTag split, std::vector<Hotel> hotels, std::vector<GameRecord> games);

  SplitTag split() const { return split_; }
  const std::vector<GameRecord>& games() const { return games_; }
  const std::vector<Hotel>& hotels() const { return hotels_; }

  const Review& review(std::string_view review_id) const;
  const Hotel& hotel(std::string_view hotel_id) const;
  bool has_review(std::string_view review_id) const;
  std::vector<const Review*> all_reviews() const;

  /// Subset of games whose pair_id is in `pair_ids`, sharing the stores.
  Dataset subset(std::span<const std::string> pair_ids) const;

 private:
  SplitTag split_ = SplitTag::TrainValidation;
  std::vector<Hotel> hotels_;
  std::vector<GameRecord> games_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> review_index_;
  std::map<std::string, std::size_t, std::less<>> hotel_index_;
};

/// Checks trial count, index coverage, distinct hotels, score membership and
/// payoff consistency against `dataset`-style lookups.
void validate_game(const GameRecord& game, const std::map<std::string, const Hotel*, std::less<>>& hotels);

}  // namespace dmpred
