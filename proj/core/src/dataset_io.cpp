#include "dmpred/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "dmpred/csv.hpp"

namespace dmpred {
namespace {

int parse_int(const std::string& text, const std::string& where, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(where + ": invalid " + what + " '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::string& where, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(where + ": invalid " + what + " '" + text + "'");
  }
  return value;
}

bool parse_flag(const std::string& text, const std::string& where, const char* what) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw ParseError(where + ": " + what + " must be 0 or 1, got '" + text + "'");
}

std::string payoff_str(double v) {
  // Payoffs are tenths (dm) or 0/1 (expert).
  const long tenths = std::lround(v * 10.0);
  Score s = Score::from_tenths(static_cast<int>(tenths));
  return s.str();
}

}  // namespace

std::vector<Hotel> load_hotels(const std::filesystem::path& reviews_path) {
  csv::Table table(reviews_path, csv::read_file(reviews_path));
  const auto c_id = table.column("review_id");
  const auto c_hotel = table.column("hotel_id");
  const auto c_score = table.column("score");
  const auto c_pos = table.column("positive_text");
  const auto c_neg = table.column("negative_text");
  const auto c_first = table.column("positive_shown_first");

  std::vector<Hotel> hotels;
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string where = table.where(i);
    Review r;
    r.review_id = table.cell(i, c_id);
    r.hotel_id = table.cell(i, c_hotel);
    r.positive_text = table.cell(i, c_pos);
    r.negative_text = table.cell(i, c_neg);
    r.positive_shown_first = parse_flag(table.cell(i, c_first), where, "positive_shown_first");
    try {
      r.score = Score::parse(table.cell(i, c_score));
      validate_review(r);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    auto [it, inserted] = index.emplace(r.hotel_id, hotels.size());
    if (inserted) hotels.push_back(Hotel{r.hotel_id, {}});
    hotels[it->second].reviews.push_back(std::move(r));
  }
  for (const auto& h : hotels) {
    try {
      validate_hotel(h);
    } catch (const ValidationError& e) {
      throw ParseError(reviews_path.string() + ": " + e.what());
    }
  }
  return hotels;
}

Dataset load_dataset(const std::filesystem::path& games_path, const std::vector<Hotel>& hotels,
                     std::optional<SplitTag> declared) {
  csv::Table table(games_path, csv::read_file(games_path));
  const auto c_pair = table.column("pair_id");
  const auto c_index = table.column("trial_index");
  const auto c_hotel = table.column("hotel_id");
  const auto c_review = table.column("shown_review_id");
  const auto c_decision = table.column("decision");
  const auto c_score = table.column("random_score");
  const auto c_split = table.column("split_tag");
  const auto opt = [&](std::string_view name) -> std::optional<std::size_t> {
    if (table.has_column(name)) return table.column(name);
    return std::nullopt;
  };
  const auto c_dm = opt("dm_payoff");
  const auto c_ex = opt("expert_payoff");
  const auto c_age = opt("dm_age");
  const auto c_gender = opt("dm_gender");

  std::map<std::string, const Hotel*, std::less<>> by_hotel;
  std::map<std::string, const Review*, std::less<>> by_review;
  for (const auto& h : hotels) {
    by_hotel.emplace(h.hotel_id, &h);
    for (const auto& r : h.reviews) by_review.emplace(r.review_id, &r);
  }

  std::vector<GameRecord> games;
  std::map<std::string, std::size_t, std::less<>> game_index;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string where = table.where(i);
    const std::string& pair_id = table.cell(i, c_pair);
    SplitTag split;
    try {
      split = parse_split_tag(table.cell(i, c_split));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    auto [it, inserted] = game_index.emplace(pair_id, games.size());
    if (inserted) {
      GameRecord g;
      g.pair_id = pair_id;
      g.split = split;
      games.push_back(std::move(g));
    }
    GameRecord& game = games[it->second];
    if (game.split != split) throw ParseError(where + ": split_tag differs from earlier rows of " + pair_id);

    const int index = parse_int(table.cell(i, c_index), where, "trial_index");
    const std::string& hotel_id = table.cell(i, c_hotel);
    const std::string& review_id = table.cell(i, c_review);
    auto rv = by_review.find(review_id);
    if (rv == by_review.end()) throw ParseError(where + ": unknown shown_review_id '" + review_id + "'");
    auto ht = by_hotel.find(hotel_id);
    if (ht == by_hotel.end()) throw ParseError(where + ": unknown hotel_id '" + hotel_id + "'");
    if (rv->second->hotel_id != hotel_id) {
      throw ParseError(where + ": review " + review_id + " does not belong to hotel " + hotel_id);
    }
    const bool hotel_choice = parse_flag(table.cell(i, c_decision), where, "decision");
    Score score;
    try {
      score = Score::parse(table.cell(i, c_score));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!ht->second->has_score(score)) {
      throw ParseError(where + ": random_score " + score.str() + " is not one of hotel " + hotel_id +
                       "'s seven scores");
    }
    Trial t;
    try {
      t = make_trial(index, hotel_id, review_id, hotel_choice ? Decision::Hotel : Decision::StayHome, score);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (c_dm && !table.cell(i, *c_dm).empty()) {
      const double given = parse_double(table.cell(i, *c_dm), where, "dm_payoff");
      if (std::abs(given - t.dm_payoff) > kTolerance) {
        throw ParseError(where + ": dm_payoff " + table.cell(i, *c_dm) + " disagrees with recomputed " +
                         payoff_str(t.dm_payoff));
      }
    }
    if (c_ex && !table.cell(i, *c_ex).empty()) {
      const double given = parse_double(table.cell(i, *c_ex), where, "expert_payoff");
      if (std::abs(given - t.expert_payoff) > kTolerance) {
        throw ParseError(where + ": expert_payoff " + table.cell(i, *c_ex) + " disagrees with recomputed value");
      }
    }
    if (c_age && !table.cell(i, *c_age).empty()) {
      game.decision_maker.age = parse_int(table.cell(i, *c_age), where, "dm_age");
    }
    if (c_gender && !table.cell(i, *c_gender).empty()) game.decision_maker.gender = table.cell(i, *c_gender);
    game.trials.push_back(std::move(t));
  }

  for (auto& g : games) {
    std::sort(g.trials.begin(), g.trials.end(), [](const Trial& a, const Trial& b) { return a.index < b.index; });
    if (g.trials.size() != kTrialsPerGame) {
      throw ParseError(games_path.string() + ": game " + g.pair_id + " has " + std::to_string(g.trials.size()) +
                       " trial rows, expected 10");
    }
  }

  SplitTag split = SplitTag::TrainValidation;
  if (declared) {
    split = *declared;
  } else if (!games.empty()) {
    split = games.front().split;
  }
  try {
    return Dataset::build(split, hotels, std::move(games));
  } catch (const ValidationError& e) {
    throw ParseError(games_path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& games_path, const std::filesystem::path& reviews_path,
                     std::optional<SplitTag> declared) {
  return load_dataset(games_path, load_hotels(reviews_path), declared);
}

void save_reviews(const std::vector<Hotel>& hotels, const std::filesystem::path& reviews_path) {
  std::ofstream out(reviews_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + reviews_path.string());
  csv::write_row(out, {"review_id", "hotel_id", "score", "positive_text", "negative_text", "positive_shown_first"});
  for (const auto& h : hotels) {
    for (const auto& r : h.reviews) {
      csv::write_row(out, {r.review_id, r.hotel_id, r.score.str(), r.positive_text, r.negative_text,
                           r.positive_shown_first ? "1" : "0"});
    }
  }
  if (!out) throw std::runtime_error("failed writing " + reviews_path.string());
}

void save_games(const std::vector<GameRecord>& games, const std::filesystem::path& games_path) {
  std::ofstream out(games_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + games_path.string());
  csv::write_row(out, {"pair_id", "trial_index", "hotel_id", "shown_review_id", "decision", "random_score",
                       "dm_payoff", "expert_payoff", "split_tag", "dm_age", "dm_gender"});
  for (const auto& g : games) {
    for (const auto& t : g.trials) {
      csv::write_row(out, {g.pair_id, std::to_string(t.index), t.hotel_id, t.shown_review_id,
                           std::to_string(label_of(t.decision)), t.random_score.str(), payoff_str(t.dm_payoff),
                           t.expert_payoff > 0.5 ? "1" : "0", std::string(to_string(g.split)),
                           g.decision_maker.age ? std::to_string(*g.decision_maker.age) : "",
                           g.decision_maker.gender.value_or("")});
    }
  }
  if (!out) throw std::runtime_error("failed writing " + games_path.string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& games_path,
                  const std::filesystem::path& reviews_path) {
  save_reviews(dataset.hotels(), reviews_path);
  save_games(dataset.games(), games_path);
}

}  // namespace dmpred
