#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmpred/csv.hpp"
#include "dmpred/features.hpp"
#include "dmpred/game.hpp"

#ifndef DMPRED_FIXTURE_DIR
#error "DMPRED_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace dmpred::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(DMPRED_FIXTURE_DIR) / name; }

/// The four sample reviews (ids sample-r1 .. sample-r4).
inline std::vector<Review> sample_reviews() {
  const csv::Table t(fixture("sample_reviews.csv"), csv::read_file(fixture("sample_reviews.csv")));
  std::vector<Review> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Review r;
    r.review_id = t.cell(i, t.column("review_id"));
    r.hotel_id = "sample";
    r.score = Score::parse(t.cell(i, t.column("score")));
    r.positive_text = t.cell(i, t.column("positive_text"));
    r.negative_text = t.cell(i, t.column("negative_text"));
    r.positive_shown_first = t.cell(i, t.column("positive_shown_first")) == "1";
    out.push_back(std::move(r));
  }
  return out;
}

inline HCTable sample_gold() { return load_feature_overrides(fixture("sample_overrides.csv")); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("dmpred_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dmpred::testing
