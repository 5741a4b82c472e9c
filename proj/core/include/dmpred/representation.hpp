#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmpred/embeddings.hpp"
#include "dmpred/features.hpp"
#include "dmpred/game.hpp"

namespace dmpred {

enum class TextualSource { Hc, Dnn, HcDnn };

std::string_view to_string(TextualSource source);
/// "hc", "dnn", "hc+dnn" (also "hc_dnn").
TextualSource parse_textual_source(std::string_view text);
bool uses_hc(TextualSource source);
bool uses_dnn(TextualSource source);

/// Precomputed textual vector per review: HC bits, standardized embedding, or
/// both concatenated (HC first). Immutable once built.
class FeatureBank {
 public:
  FeatureBank() = default;

  /// `hc` is required for HC sources, `embeddings` + `standardizer` for DNN
  /// sources. Every id in `review_ids` must resolve; a missing id throws a
  /// ValidationError naming it.
  static FeatureBank build(TextualSource source, std::span<const std::string> review_ids, const HCTable* hc,
                           const EmbeddingTable* embeddings, const Standardizer* standardizer);

  TextualSource source() const { return source_; }
  std::size_t textual_dim() const { return dim_; }
  std::span<const double> textual(std::string_view review_id) const;

 private:
  TextualSource source_ = TextualSource::Hc;
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

std::size_t svm_dim(std::size_t textual_dim, bool behavioral);

/// PWB (8, only when `behavioral`) ++ PWT ++ SWT. Prefix weights are
/// 0.8^(pr+1-t) for behavior and 0.9^(pr+1-t) for text, divided by pr; an
/// empty prefix gives zero blocks.
std::vector<double> svm_representation(const PrefixExample& example, const FeatureBank& bank, bool behavioral);

/// Ten per-trial rows. Row layout: behavioral block (8, only when
/// `behavioral`; zero for suffix trials) then the textual block.
struct TrialFeatureSeq {
  std::size_t dim = 0;
  int prefix_size = 0;
  std::vector<double> values;  // kTrialsPerGame * dim, row-major

  std::span<const double> row(int trial) const {  // 0-based
    return {values.data() + static_cast<std::size_t>(trial) * dim, dim};
  }
};

std::size_t sequence_dim(std::size_t textual_dim, bool behavioral);
TrialFeatureSeq sequence_representation(const PrefixExample& example, const FeatureBank& bank, bool behavioral);

}  // namespace dmpred
