#include "dmpred/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "dmpred/game.hpp"

namespace dmpred {
namespace {

#include "lexicon_default.inc"

constexpr std::array<std::string_view, Lexicon::kPositiveTopics> kPositiveTopicNames = {
    "facilities", "price", "design", "location", "room", "staff", "food", "transportation", "sanitary", "view"};
constexpr std::array<std::string_view, Lexicon::kNegativeTopics> kNegativeTopicNames = {
    "price", "staff", "sanitary", "room", "food", "location", "facilities", "air"};

std::vector<std::string>* section_slot(Lexicon& lex, std::string_view name) {
  for (int g = 0; g < 3; ++g) {
    if (name == "sentiment.positive." + std::to_string(g + 1)) return &lex.positive_groups[g];
    if (name == "sentiment.negative." + std::to_string(g + 1)) return &lex.negative_groups[g];
  }
  for (std::size_t i = 0; i < kPositiveTopicNames.size(); ++i) {
    if (name == "topic.positive." + std::string(kPositiveTopicNames[i])) return &lex.positive_topics[i];
  }
  for (std::size_t i = 0; i < kNegativeTopicNames.size(); ++i) {
    if (name == "topic.negative." + std::string(kNegativeTopicNames[i])) return &lex.negative_topics[i];
  }
  if (name == "cue.summary.positive") return &lex.positive_summary;
  if (name == "cue.summary.negative") return &lex.negative_summary;
  if (name == "cue.nothing.positive") return &lex.nothing_positive;
  if (name == "cue.nothing.negative") return &lex.nothing_negative;
  return nullptr;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\''; }

}  // namespace

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view text) {
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && space(text.front())) text.remove_prefix(1);
  while (!text.empty() && space(text.back())) text.remove_suffix(1);
  return text;
}

bool contains_term(std::string_view text, std::string_view term) {
  bool prefix = false;
  if (term.ends_with('*')) {
    prefix = true;
    term.remove_suffix(1);
  }
  if (term.empty()) return false;
  for (std::size_t pos = text.find(term); pos != std::string_view::npos; pos = text.find(term, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(term.front());
    const std::size_t end = pos + term.size();
    const bool right_ok = prefix || end == text.size() || !is_word_char(text[end]) || !is_word_char(term.back());
    if (left_ok && right_ok) return true;
  }
  return false;
}

const std::vector<std::string>& lexicon_sections() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (int g = 1; g <= 3; ++g) out.push_back("sentiment.positive." + std::to_string(g));
    for (int g = 1; g <= 3; ++g) out.push_back("sentiment.negative." + std::to_string(g));
    for (auto n : kPositiveTopicNames) out.push_back("topic.positive." + std::string(n));
    for (auto n : kNegativeTopicNames) out.push_back("topic.negative." + std::string(n));
    out.insert(out.end(), {"cue.summary.positive", "cue.summary.negative", "cue.nothing.positive",
                           "cue.nothing.negative"});
    return out;
  }();
  return names;
}

std::string_view Lexicon::default_text() { return kDefaultLexicon; }

const Lexicon& Lexicon::defaults() {
  static const Lexicon lex = parse(kDefaultLexicon);
  return lex;
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::vector<std::string>* current = nullptr;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string_view entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (entry.front() == '[') {
      if (entry.back() != ']') throw ParseError("lexicon line " + std::to_string(line_no) + ": malformed header");
      const std::string name(entry.substr(1, entry.size() - 2));
      current = section_slot(lex, name);
      if (current == nullptr) {
        throw ParseError("lexicon line " + std::to_string(line_no) + ": unknown section [" + name + "]");
      }
      continue;
    }
    if (current == nullptr) {
      throw ParseError("lexicon line " + std::to_string(line_no) + ": entry before any section header");
    }
    current->emplace_back(entry);
  }
  try {
    lex.validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("lexicon: ") + e.what());
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string Lexicon::serialize() const {
  Lexicon copy = *this;
  std::ostringstream out;
  for (const auto& name : lexicon_sections()) {
    out << '[' << name << "]\n";
    for (const auto& e : *section_slot(copy, name)) out << e << '\n';
    out << '\n';
  }
  return out.str();
}

void Lexicon::validate() const {
  auto check_list = [](const std::vector<std::string>& list) {
    for (const auto& e : list) {
      if (e.empty()) throw ValidationError("empty lexicon entry");
      if (e != to_lower_ascii(e)) throw ValidationError("lexicon entry '" + e + "' is not lowercase");
    }
  };
  auto check_disjoint = [&](const std::array<std::vector<std::string>, 3>& groups, const char* polarity) {
    std::set<std::string> seen;
    for (const auto& g : groups) {
      check_list(g);
      for (const auto& e : g) {
        if (!seen.insert(e).second) {
          throw ValidationError(std::string(polarity) + " sentiment entry '" + e + "' appears in two groups");
        }
      }
    }
  };
  check_disjoint(positive_groups, "positive");
  check_disjoint(negative_groups, "negative");
  for (const auto& t : positive_topics) check_list(t);
  for (const auto& t : negative_topics) check_list(t);
  check_list(positive_summary);
  check_list(negative_summary);
  check_list(nothing_positive);
  check_list(nothing_negative);
}

}  // namespace dmpred
