#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dmpred::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Handles CRLF and a leading UTF-8 BOM.
std::vector<Row> parse(std::string_view text);
/// Reads the whole file; throws ParseError naming the path on I/O failure.
std::vector<Row> read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Header lookup helper. `line_of(i)` reports 1-based file line numbers
/// assuming one physical line per record, used only in error messages.
class Table {
 public:
  Table(std::filesystem::path source, std::vector<Row> rows);

  bool has_column(std::string_view name) const;
  /// Throws ParseError when the column is absent.
  std::size_t column(std::string_view name) const;
  std::size_t size() const { return rows_.empty() ? 0 : rows_.size() - 1; }
  const Row& row(std::size_t i) const { return rows_[i + 1]; }
  const std::string& cell(std::size_t i, std::size_t col) const;
  std::string where(std::size_t i) const;
  const Row& header() const { return rows_.front(); }

 private:
  std::filesystem::path source_;
  std::vector<Row> rows_;
  std::map<std::string, std::size_t, std::less<>> columns_;
};

}  // namespace dmpred::csv
