#pragma once

#include <filesystem>
#include <optional>

#include "dmpred/game.hpp"

namespace dmpred {

/// Loads reviews.csv and games.csv into a cross-referenced Dataset.
///
/// reviews.csv: review_id, hotel_id, score, positive_text, negative_text,
/// positive_shown_first (0/1). Hotels are formed by grouping on hotel_id in
/// file order and must have exactly 7 reviews each.
///
/// games.csv: pair_id, trial_index, hotel_id, shown_review_id,
/// decision (1 = hotel, 0 = stay home), random_score, split_tag, plus the
/// optional columns dm_payoff, expert_payoff, dm_age, dm_gender. Payoffs are
/// always recomputed; a provided payoff that differs by more than 1e-9 is an
/// error.
///
/// When `declared` is empty, all games must share one split tag (an empty
/// games file yields a train_validation dataset).
Dataset load_dataset(const std::filesystem::path& games_path, const std::filesystem::path& reviews_path,
                     std::optional<SplitTag> declared = std::nullopt);

Dataset load_dataset(const std::filesystem::path& games_path, const std::vector<Hotel>& hotels,
                     std::optional<SplitTag> declared = std::nullopt);
std::vector<Hotel> load_hotels(const std::filesystem::path& reviews_path);

void save_reviews(const std::vector<Hotel>& hotels, const std::filesystem::path& reviews_path);
void save_games(const std::vector<GameRecord>& games, const std::filesystem::path& games_path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& games_path,
                  const std::filesystem::path& reviews_path);

}  // namespace dmpred
