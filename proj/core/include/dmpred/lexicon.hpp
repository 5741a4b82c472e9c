#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dmpred {

/// Word lists driving the hand-crafted textual features.
///
/// Sentiment groups are matched as lowercase substrings. Topic keywords and
/// cue phrases are matched on word boundaries; a trailing '*' turns an entry
/// into a prefix match ("view*" hits "views").
struct Lexicon {
  static constexpr std::size_t kPositiveTopics = 10;  // features 1..10
  static constexpr std::size_t kNegativeTopics = 8;   // features 20..27

  std::array<std::vector<std::string>, 3> positive_groups;
  std::array<std::vector<std::string>, 3> negative_groups;
  std::array<std::vector<std::string>, kPositiveTopics> positive_topics;
  std::array<std::vector<std::string>, kNegativeTopics> negative_topics;
  std::vector<std::string> positive_summary;
  std::vector<std::string> negative_summary;
  std::vector<std::string> nothing_positive;
  std::vector<std::string> nothing_negative;

  /// The shipped lexicon (sentiment groups as published, heuristic topic and
  /// cue lists).
  static const Lexicon& defaults();
  static std::string_view default_text();

  /// Sectioned plain text: "[section]" headers, one entry per line, '#'
  /// comments. Throws ParseError on unknown sections or invalid entries.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);
  std::string serialize() const;

  /// Entries lowercase and non-empty; groups disjoint within each polarity.
  void validate() const;

  bool operator==(const Lexicon&) const = default;
};

/// Section names in file order, e.g. "sentiment.positive.1",
/// "topic.negative.air".
const std::vector<std::string>& lexicon_sections();

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

/// Whole-word / whole-phrase match of `term` in already-lowercased `text`.
bool contains_term(std::string_view text, std::string_view term);

}  // namespace dmpred
