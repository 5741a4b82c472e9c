#include "dmpred/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace dmpred {

Score Score::from_double(double value) {
  const double scaled = value * 10.0;
  const double rounded = std::round(scaled);
  if (!std::isfinite(value) || std::abs(scaled - rounded) > 1e-9 * 10.0 + 1e-9) {
    std::ostringstream oss;
    oss << "score " << value << " is not a multiple of 0.1";
    throw ValidationError(oss.str());
  }
  return Score(static_cast<int>(rounded));
}

Score Score::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("cannot parse score '" + std::string(text) + "'");
  }
  return from_double(value);
}

std::string Score::str() const {
  const int whole = tenths_ / 10;
  const int frac = std::abs(tenths_ % 10);
  std::string out = (tenths_ < 0 && whole == 0) ? "-" : "";
  return out + std::to_string(whole) + "." + std::to_string(frac);
}

bool score_in_range(double value) {
  return value >= kMinScore - kTolerance && value <= kMaxScore + kTolerance;
}

std::string_view to_string(SplitTag tag) {
  return tag == SplitTag::Test ? "test" : "train_validation";
}

SplitTag parse_split_tag(std::string_view text) {
  if (text == "train_validation") return SplitTag::TrainValidation;
  if (text == "test") return SplitTag::Test;
  throw ValidationError("unknown split tag '" + std::string(text) + "'");
}

void validate_review(const Review& review) {
  if (review.review_id.empty()) throw ValidationError("review with empty review_id");
  if (!score_in_range(review.score.value())) {
    throw ValidationError("review " + review.review_id + ": score " + review.score.str() +
                          " outside [2.5, 10]");
  }
  if (review.positive_text.empty() && review.negative_text.empty()) {
    throw ValidationError("review " + review.review_id + ": both text parts are empty");
  }
}

std::vector<Score> Hotel::scores() const {
  std::vector<Score> out;
  out.reserve(reviews.size());
  for (const auto& r : reviews) out.push_back(r.score);
  return out;
}

bool Hotel::has_score(Score s) const {
  return std::any_of(reviews.begin(), reviews.end(), [&](const Review& r) { return r.score == s; });
}

const Review* Hotel::find_review(std::string_view review_id) const {
  for (const auto& r : reviews) {
    if (r.review_id == review_id) return &r;
  }
  return nullptr;
}

void validate_hotel(const Hotel& hotel) {
  if (hotel.reviews.size() != kReviewsPerHotel) {
    throw ValidationError("hotel " + hotel.hotel_id + " has " + std::to_string(hotel.reviews.size()) +
                          " reviews, expected 7");
  }
  for (const auto& r : hotel.reviews) {
    if (r.hotel_id != hotel.hotel_id) {
      throw ValidationError("review " + r.review_id + " belongs to hotel " + r.hotel_id + ", not " +
                            hotel.hotel_id);
    }
    validate_review(r);
  }
}

double dm_payoff(Decision decision, double random_score) {
  if (!score_in_range(random_score)) {
    std::ostringstream oss;
    oss << "random score " << random_score << " outside [2.5, 10]";
    throw ValidationError(oss.str());
  }
  return decision == Decision::Hotel ? random_score - kHotelCost : 0.0;
}

double expert_payoff(Decision decision) { return decision == Decision::Hotel ? 1.0 : 0.0; }

Trial make_trial(int index, std::string hotel_id, std::string shown_review_id, Decision decision,
                 Score random_score) {
  Trial t;
  t.index = index;
  t.hotel_id = std::move(hotel_id);
  t.shown_review_id = std::move(shown_review_id);
  t.decision = decision;
  t.random_score = random_score;
  dm_payoff(decision, random_score.value());  // range check
  // Computed in tenths so the stored payoff is the nearest double to the decimal.
  t.dm_payoff = decision == Decision::Hotel ? (random_score.tenths() - 80) / 10.0 : 0.0;
  t.expert_payoff = expert_payoff(decision);
  return t;
}

std::vector<PrefixExample> expand_game(const GameRecord& game) {
  std::vector<PrefixExample> out;
  out.reserve(kTrialsPerGame);
  std::vector<std::string> shown;
  shown.reserve(game.trials.size());
  for (const auto& t : game.trials) shown.push_back(t.shown_review_id);

  for (int pr = 0; pr < kTrialsPerGame; ++pr) {
    PrefixExample ex;
    ex.pair_id = game.pair_id;
    ex.prefix_size = pr;
    ex.shown_reviews = shown;
    int hotels = 0;
    for (int t = 0; t < kTrialsPerGame; ++t) {
      const auto& trial = game.trials[static_cast<std::size_t>(t)];
      if (t < pr) {
        ex.prefix_decisions.push_back(trial.decision);
        ex.prefix_scores.push_back(trial.random_score);
      } else {
        const int y = label_of(trial.decision);
        ex.suffix_labels.push_back(y);
        hotels += y;
      }
    }
    ex.choice_rate = static_cast<double>(hotels) / static_cast<double>(kTrialsPerGame - pr);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<PrefixExample> expand_games(std::span<const GameRecord> games, int min_prefix) {
  std::vector<PrefixExample> out;
  out.reserve(games.size() * kTrialsPerGame);
  for (const auto& g : games) {
    for (auto& ex : expand_game(g)) {
      if (ex.prefix_size >= min_prefix) out.push_back(std::move(ex));
    }
  }
  return out;
}

void validate_game(const GameRecord& game,
                   const std::map<std::string, const Hotel*, std::less<>>& hotels) {
  const std::string where = "game " + game.pair_id;
  if (game.trials.size() != kTrialsPerGame) {
    throw ValidationError(where + " has " + std::to_string(game.trials.size()) + " trials, expected 10");
  }
  std::set<std::string> seen_hotels;
  for (std::size_t i = 0; i < game.trials.size(); ++i) {
    const Trial& t = game.trials[i];
    const std::string tw = where + " trial " + std::to_string(t.index);
    if (t.index != static_cast<int>(i) + 1) {
      throw ValidationError(where + ": trial indices must be 1..10 each exactly once");
    }
    auto it = hotels.find(t.hotel_id);
    if (it == hotels.end()) throw ValidationError(tw + ": unknown hotel " + t.hotel_id);
    const Hotel& h = *it->second;
    if (h.find_review(t.shown_review_id) == nullptr) {
      throw ValidationError(tw + ": review " + t.shown_review_id + " is not a review of hotel " + t.hotel_id);
    }
    if (!h.has_score(t.random_score)) {
      throw ValidationError(tw + ": random score " + t.random_score.str() + " is not one of hotel " +
                            t.hotel_id + "'s scores");
    }
    const double dm = dm_payoff(t.decision, t.random_score);
    if (std::abs(dm - t.dm_payoff) > kTolerance || std::abs(expert_payoff(t.decision) - t.expert_payoff) > kTolerance) {
      throw ValidationError(tw + ": payoff columns disagree with the payoff rules");
    }
    if (!seen_hotels.insert(t.hotel_id).second) {
      throw ValidationError(where + ": hotel " + t.hotel_id + " appears in more than one trial");
    }
  }
}

Dataset Dataset::build(SplitTag split, std::vector<Hotel> hotels, std::vector<GameRecord> games) {
  Dataset ds;
  ds.split_ = split;
  ds.hotels_ = std::move(hotels);
  ds.games_ = std::move(games);

  std::map<std::string, const Hotel*, std::less<>> by_id;
  for (std::size_t h = 0; h < ds.hotels_.size(); ++h) {
    const Hotel& hotel = ds.hotels_[h];
    validate_hotel(hotel);
    if (!ds.hotel_index_.emplace(hotel.hotel_id, h).second) {
      throw ValidationError("duplicate hotel id " + hotel.hotel_id);
    }
    for (std::size_t r = 0; r < hotel.reviews.size(); ++r) {
      if (!ds.review_index_.emplace(hotel.reviews[r].review_id, std::pair{h, r}).second) {
        throw ValidationError("duplicate review id " + hotel.reviews[r].review_id);
      }
    }
  }
  for (const auto& hotel : ds.hotels_) by_id.emplace(hotel.hotel_id, &hotel);

  std::set<std::string> pair_ids;
  for (const auto& g : ds.games_) {
    if (g.split != split) {
      throw ValidationError("game " + g.pair_id + " has split_tag " + std::string(to_string(g.split)) +
                            " but the dataset is " + std::string(to_string(split)));
    }
    if (!pair_ids.insert(g.pair_id).second) throw ValidationError("duplicate pair_id " + g.pair_id);
    validate_game(g, by_id);
  }
  return ds;
}

const Review& Dataset::review(std::string_view review_id) const {
  auto it = review_index_.find(review_id);
  if (it == review_index_.end()) throw ValidationError("unknown review id " + std::string(review_id));
  return hotels_[it->second.first].reviews[it->second.second];
}

const Hotel& Dataset::hotel(std::string_view hotel_id) const {
  auto it = hotel_index_.find(hotel_id);
  if (it == hotel_index_.end()) throw ValidationError("unknown hotel id " + std::string(hotel_id));
  return hotels_[it->second];
}

bool Dataset::has_review(std::string_view review_id) const { return review_index_.contains(review_id); }

std::vector<const Review*> Dataset::all_reviews() const {
  std::vector<const Review*> out;
  for (const auto& h : hotels_) {
    for (const auto& r : h.reviews) out.push_back(&r);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::string> pair_ids) const {
  std::set<std::string_view> wanted(pair_ids.begin(), pair_ids.end());
  Dataset ds = *this;
  ds.games_.clear();
  for (const auto& g : games_) {
    if (wanted.contains(g.pair_id)) ds.games_.push_back(g);
  }
  return ds;
}

}  // namespace dmpred
