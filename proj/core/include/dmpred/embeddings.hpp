#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dmpred {

/// Dense review vectors keyed by review id.
///
/// File format: a header line "review_id,<dim>" (the literal word "dim" is
/// also accepted, in which case the width of the first row decides), then
/// one line per review: the id followed by `dim` comma-separated decimals.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  bool contains(std::string_view id) const { return rows_.find(id) != rows_.end(); }

  /// Throws ValidationError when the width differs from dim() or the id repeats.
  void add(std::string id, std::vector<double> values);
  /// Throws ValidationError naming the id when it is absent.
  std::span<const double> at(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>, std::less<>> rows_;
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);
/// Rows are written in id order with 9 significant digits.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Per-coordinate mean / standard deviation. Coordinates with zero variance
/// keep scale 1 so they map to 0 rather than NaN.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const EmbeddingTable& table, std::span<const std::string> ids);
  std::vector<double> apply(std::span<const double> v) const;
  bool empty() const { return mean.empty(); }
};

}  // namespace dmpred
