#include "dmpred/features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "dmpred/csv.hpp"

namespace dmpred {
namespace {

constexpr std::size_t kShortLimit = 100;
constexpr std::size_t kLongFrom = 200;
constexpr double kLowRatio = 0.7;
constexpr double kHighRatio = 4.0;
constexpr std::size_t kDetailedChars = 400;

bool any_term(std::string_view text, const std::vector<std::string>& terms) {
  return std::any_of(terms.begin(), terms.end(), [&](const std::string& t) { return contains_term(text, t); });
}

bool any_substring(std::string_view text, const std::vector<std::string>& terms) {
  return std::any_of(terms.begin(), terms.end(),
                     [&](const std::string& t) { return text.find(t) != std::string_view::npos; });
}

bool has_content(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

// Numbered ("1." / "2)") or bulleted ("- ", "* ") items.
int count_list_markers(std::string_view text) {
  int markers = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool at_start = i == 0 || std::isspace(static_cast<unsigned char>(text[i - 1])) != 0;
    if (!at_start) continue;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) ++j;
    if (j > i && j - i <= 2 && j < text.size() && (text[j] == '.' || text[j] == ')') &&
        (j + 1 == text.size() || text[j + 1] == ' ')) {
      ++markers;
      i = j;
      continue;
    }
    if ((text[i] == '-' || text[i] == '*') && i + 1 < text.size() && text[i + 1] == ' ') ++markers;
  }
  return markers;
}

void set_length_bucket(HCFeatureVector& v, std::size_t chars, int first_feature) {
  if (chars < kShortLimit) v.set(first_feature);
  else if (chars < kLongFrom) v.set(first_feature + 1);
  else v.set(first_feature + 2);
}

}  // namespace

std::size_t HCFeatureVector::slot(int feature) {
  if (feature < 1 || feature > static_cast<int>(kHandCraftedDim)) {
    throw std::out_of_range("hand-crafted feature number " + std::to_string(feature) + " outside 1..42");
  }
  return static_cast<std::size_t>(feature - 1);
}

std::array<double, kHandCraftedDim> HCFeatureVector::as_doubles() const {
  std::array<double, kHandCraftedDim> out{};
  for (std::size_t i = 0; i < kHandCraftedDim; ++i) out[i] = bits_.test(i) ? 1.0 : 0.0;
  return out;
}

std::string HCFeatureVector::str() const {
  std::string s(kHandCraftedDim, '0');
  for (std::size_t i = 0; i < kHandCraftedDim; ++i) s[i] = bits_.test(i) ? '1' : '0';
  return s;
}

void validate_hc_vector(const HCFeatureVector& v) {
  auto exactly_one = [&](int a) {
    const int n = int(v.get(a)) + int(v.get(a + 1)) + int(v.get(a + 2));
    if (n != 1) {
      throw ValidationError("exactly one of features " + std::to_string(a) + "-" + std::to_string(a + 2) +
                            " must be set");
    }
  };
  exactly_one(17);
  exactly_one(34);
  exactly_one(40);
  if (v.get(11) && !v.get(17)) throw ValidationError("feature 11 (empty positive part) requires feature 17");
}

BehavioralVector behavioral_features(Decision decision, double rs) {
  if (!score_in_range(rs)) {
    throw ValidationError("random score " + std::to_string(rs) + " outside [2.5, 10]");
  }
  const bool hotel = decision == Decision::Hotel;
  const bool loss = rs < kHotelCost;
  BehavioralVector b;
  b.bits[BehavioralVector::kDecision] = hotel;
  b.bits[BehavioralVector::kScoreBelow3] = rs < 3.0;
  b.bits[BehavioralVector::kScore3To5] = rs >= 3.0 && rs < 5.0;
  b.bits[BehavioralVector::kScoreAbove8] = rs > 8.0;
  b.bits[BehavioralVector::kChoseLost] = hotel && loss;
  b.bits[BehavioralVector::kStayedCouldLose] = !hotel && loss;
  b.bits[BehavioralVector::kChoseEarned] = hotel && !loss;
  b.bits[BehavioralVector::kStayedCouldEarn] = !hotel && !loss;
  return b;
}

HCFeatureVector hand_crafted_features(const Review& review, const Lexicon& lexicon) {
  HCFeatureVector v;
  const std::string_view pos_raw = trim(review.positive_text);
  const std::string_view neg_raw = trim(review.negative_text);
  const std::string pos = to_lower_ascii(pos_raw);
  const std::string neg = to_lower_ascii(neg_raw);
  const bool pos_empty = !has_content(pos);
  const bool neg_empty = !has_content(neg);

  for (std::size_t i = 0; i < Lexicon::kPositiveTopics; ++i) {
    v.set(static_cast<int>(i) + 1, any_term(pos, lexicon.positive_topics[i]));
  }
  v.set(11, pos_empty);
  v.set(12, !pos_empty && any_term(pos, lexicon.nothing_positive));
  v.set(13, any_term(pos, lexicon.positive_summary));
  for (int g = 0; g < 3; ++g) v.set(14 + g, any_substring(pos, lexicon.positive_groups[g]));
  set_length_bucket(v, pos.size(), 17);

  for (std::size_t i = 0; i < Lexicon::kNegativeTopics; ++i) {
    v.set(static_cast<int>(i) + 20, any_term(neg, lexicon.negative_topics[i]));
  }
  v.set(28, neg_empty);
  v.set(29, !neg_empty && any_term(neg, lexicon.nothing_negative));
  v.set(30, any_term(neg, lexicon.negative_summary));
  for (int g = 0; g < 3; ++g) v.set(31 + g, any_substring(neg, lexicon.negative_groups[g]));
  set_length_bucket(v, neg.size(), 34);

  v.set(37, pos.size() + neg.size() >= kDetailedChars);
  v.set(38, count_list_markers(pos) + count_list_markers(neg) >= 2);
  v.set(39, review.positive_shown_first);
  if (neg.empty()) {
    v.set(42);
  } else {
    const double ratio = static_cast<double>(pos.size()) / static_cast<double>(neg.size());
    if (ratio < kLowRatio) v.set(40);
    else if (ratio <= kHighRatio) v.set(41);
    else v.set(42);
  }
  return v;
}

HCTable load_feature_overrides(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  HCTable table;
  if (rows.empty()) return table;
  csv::Table t(path, rows);
  const auto c_id = t.column("review_id");
  std::array<std::size_t, kHandCraftedDim> cols{};
  for (std::size_t f = 0; f < kHandCraftedDim; ++f) cols[f] = t.column("f" + std::to_string(f + 1));
  if (t.header().size() != kHandCraftedDim + 1) {
    throw ParseError(path.string() + ": expected review_id plus 42 feature columns, found " +
                     std::to_string(t.header().size()) + " columns");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    HCFeatureVector v;
    for (std::size_t f = 0; f < kHandCraftedDim; ++f) {
      const std::string& cell = t.cell(i, cols[f]);
      if (cell != "0" && cell != "1") {
        throw ParseError(t.where(i) + ": f" + std::to_string(f + 1) + " must be 0 or 1, got '" + cell + "'");
      }
      v.set(static_cast<int>(f) + 1, cell == "1");
    }
    try {
      validate_hc_vector(v);
    } catch (const ValidationError& e) {
      throw ParseError(t.where(i) + ": " + e.what());
    }
    if (!table.emplace(t.cell(i, c_id), v).second) {
      throw ParseError(t.where(i) + ": duplicate review_id " + t.cell(i, c_id));
    }
  }
  return table;
}

void save_feature_table(const HCTable& table, const std::vector<std::string>& order,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::Row header{"review_id"};
  for (std::size_t f = 1; f <= kHandCraftedDim; ++f) header.push_back("f" + std::to_string(f));
  csv::write_row(out, header);
  for (const auto& id : order) {
    const auto& v = table.at(id);
    csv::Row row{id};
    for (int f = 1; f <= static_cast<int>(kHandCraftedDim); ++f) row.push_back(v.get(f) ? "1" : "0");
    csv::write_row(out, row);
  }
}

HCTable hc_feature_table(const Dataset& dataset, const Lexicon& lexicon, const HCTable& overrides) {
  HCTable table;
  for (const Review* r : dataset.all_reviews()) {
    auto it = overrides.find(r->review_id);
    table.emplace(r->review_id, it != overrides.end() ? it->second : hand_crafted_features(*r, lexicon));
  }
  return table;
}

}  // namespace dmpred
