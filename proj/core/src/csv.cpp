#include "dmpred/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "dmpred/game.hpp"

namespace dmpred::csv {

std::vector<Row> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

Table::Table(std::filesystem::path source, std::vector<Row> rows)
    : source_(std::move(source)), rows_(std::move(rows)) {
  if (rows_.empty()) throw ParseError(source_.string() + ": missing header row");
  for (std::size_t c = 0; c < rows_.front().size(); ++c) {
    columns_.emplace(rows_.front()[c], c);
  }
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].size() != rows_.front().size()) {
      throw ParseError(source_.string() + " row " + std::to_string(i) + ": expected " +
                       std::to_string(rows_.front().size()) + " fields, found " +
                       std::to_string(rows_[i].size()));
    }
  }
}

bool Table::has_column(std::string_view name) const { return columns_.contains(name); }

std::size_t Table::column(std::string_view name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) {
    throw ParseError(source_.string() + ": missing required column '" + std::string(name) + "'");
  }
  return it->second;
}

const std::string& Table::cell(std::size_t i, std::size_t col) const { return rows_[i + 1][col]; }

std::string Table::where(std::size_t i) const {
  return source_.string() + " row " + std::to_string(i + 1);
}

}  // namespace dmpred::csv
