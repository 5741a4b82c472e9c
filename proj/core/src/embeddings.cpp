#include "dmpred/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dmpred/csv.hpp"
#include "dmpred/game.hpp"

namespace dmpred {

void EmbeddingTable::add(std::string id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw ValidationError("embedding for '" + id + "' has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(dim_));
  }
  const std::string key = id;
  if (!rows_.emplace(std::move(id), std::move(values)).second) {
    throw ValidationError("duplicate embedding for review '" + key + "'");
  }
}

std::span<const double> EmbeddingTable::at(std::string_view id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) throw ValidationError("no embedding for review '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> EmbeddingTable::ids() const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& [id, _] : rows_) out.push_back(id);
  return out;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path.string() + ": missing header \"review_id,dim\"");
  const auto& header = rows.front();
  if (header.size() != 2 || header[0] != "review_id") {
    throw ParseError(path.string() + " line 1: expected header \"review_id,dim\"");
  }
  std::size_t dim = 0;
  if (header[1] != "dim") {
    auto [p, ec] = std::from_chars(header[1].data(), header[1].data() + header[1].size(), dim);
    if (ec != std::errc() || p != header[1].data() + header[1].size() || dim == 0) {
      throw ParseError(path.string() + " line 1: bad dimension '" + header[1] + "'");
    }
  } else if (rows.size() > 1) {
    dim = rows[1].size() - 1;
  }
  EmbeddingTable table(dim);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.string() + " line " + std::to_string(r + 1);
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != dim + 1) {
      throw ParseError(where + ": expected " + std::to_string(dim) + " values, found " +
                       std::to_string(row.size() - 1));
    }
    std::vector<double> values(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const std::string& cell = row[j + 1];
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), values[j]);
      if (ec != std::errc() || p != cell.data() + cell.size() || !std::isfinite(values[j])) {
        throw ParseError(where + ": bad number '" + cell + "'");
      }
    }
    try {
      table.add(row[0], std::move(values));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "review_id," << table.dim() << '\n';
  char buf[32];
  for (const auto& id : table.ids()) {
    out << csv::escape(id);
    for (double v : table.at(id)) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

Standardizer Standardizer::fit(const EmbeddingTable& table, std::span<const std::string> ids) {
  if (ids.empty()) throw ValidationError("cannot fit standardization on zero reviews");
  const std::size_t d = table.dim();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& id : ids) {
    auto v = table.at(id);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += v[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(ids.size());
  for (const auto& id : ids) {
    auto v = table.at(id);
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (v[j] - s.mean[j]) * (v[j] - s.mean[j]);
  }
  for (double& sc : s.scale) {
    sc = std::sqrt(sc / static_cast<double>(ids.size()));
    if (sc < 1e-12) sc = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> v) const {
  if (v.size() != mean.size()) throw ValidationError("standardizer width mismatch");
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - mean[j]) / scale[j];
  return out;
}

}  // namespace dmpred
