#include "dmpred/representation.hpp"

#include <cmath>

namespace dmpred {
namespace {

constexpr double kBehaviorDecay = 0.8;
constexpr double kTextDecay = 0.9;

}  // namespace

std::string_view to_string(TextualSource source) {
  switch (source) {
    case TextualSource::Hc: return "hc";
    case TextualSource::Dnn: return "dnn";
    case TextualSource::HcDnn: return "hc+dnn";
  }
  return "hc";
}

TextualSource parse_textual_source(std::string_view text) {
  if (text == "hc") return TextualSource::Hc;
  if (text == "dnn") return TextualSource::Dnn;
  if (text == "hc+dnn" || text == "hc_dnn") return TextualSource::HcDnn;
  throw ValidationError("unknown textual source '" + std::string(text) + "' (expected hc, dnn or hc+dnn)");
}

bool uses_hc(TextualSource source) { return source != TextualSource::Dnn; }
bool uses_dnn(TextualSource source) { return source != TextualSource::Hc; }

FeatureBank FeatureBank::build(TextualSource source, std::span<const std::string> review_ids, const HCTable* hc,
                               const EmbeddingTable* embeddings, const Standardizer* standardizer) {
  if (uses_hc(source) && hc == nullptr) throw ValidationError("hand-crafted features required but not provided");
  if (uses_dnn(source) && (embeddings == nullptr || standardizer == nullptr)) {
    throw ValidationError("embeddings required for textual source " + std::string(to_string(source)));
  }
  FeatureBank bank;
  bank.source_ = source;
  bank.dim_ = (uses_hc(source) ? kHandCraftedDim : 0) + (uses_dnn(source) ? embeddings->dim() : 0);
  for (const auto& id : review_ids) {
    if (bank.vectors_.count(id) != 0) continue;
    std::vector<double> v;
    v.reserve(bank.dim_);
    if (uses_hc(source)) {
      auto it = hc->find(id);
      if (it == hc->end()) throw ValidationError("no hand-crafted features for review '" + id + "'");
      const auto bits = it->second.as_doubles();
      v.insert(v.end(), bits.begin(), bits.end());
    }
    if (uses_dnn(source)) {
      const auto z = standardizer->apply(embeddings->at(id));
      v.insert(v.end(), z.begin(), z.end());
    }
    bank.vectors_.emplace(id, std::move(v));
  }
  return bank;
}

std::span<const double> FeatureBank::textual(std::string_view review_id) const {
  auto it = vectors_.find(review_id);
  if (it == vectors_.end()) throw ValidationError("no textual features for review '" + std::string(review_id) + "'");
  return it->second;
}

std::size_t svm_dim(std::size_t textual_dim, bool behavioral) {
  return (behavioral ? kBehavioralDim : 0) + 2 * textual_dim;
}

std::vector<double> svm_representation(const PrefixExample& ex, const FeatureBank& bank, bool behavioral) {
  const std::size_t td = bank.textual_dim();
  const int pr = ex.prefix_size;
  std::vector<double> out(svm_dim(td, behavioral), 0.0);
  double* pwb = out.data();
  double* pwt = out.data() + (behavioral ? kBehavioralDim : 0);
  double* swt = pwt + td;
  for (int t = 1; t <= pr; ++t) {
    const int age = pr + 1 - t;
    if (behavioral) {
      const double w = std::pow(kBehaviorDecay, age) / pr;
      const auto b = behavioral_features(ex.prefix_decisions[t - 1], ex.prefix_scores[t - 1]);
      for (std::size_t j = 0; j < kBehavioralDim; ++j) pwb[j] += w * b[j];
    }
    const double w = std::pow(kTextDecay, age) / pr;
    const auto text = bank.textual(ex.shown_reviews[t - 1]);
    for (std::size_t j = 0; j < td; ++j) pwt[j] += w * text[j];
  }
  const int suffix = kTrialsPerGame - pr;
  for (int t = pr + 1; t <= kTrialsPerGame; ++t) {
    const auto text = bank.textual(ex.shown_reviews[t - 1]);
    for (std::size_t j = 0; j < td; ++j) swt[j] += text[j] / suffix;
  }
  return out;
}

std::size_t sequence_dim(std::size_t textual_dim, bool behavioral) {
  return (behavioral ? kBehavioralDim : 0) + textual_dim;
}

TrialFeatureSeq sequence_representation(const PrefixExample& ex, const FeatureBank& bank, bool behavioral) {
  TrialFeatureSeq seq;
  seq.dim = sequence_dim(bank.textual_dim(), behavioral);
  seq.prefix_size = ex.prefix_size;
  seq.values.assign(static_cast<std::size_t>(kTrialsPerGame) * seq.dim, 0.0);
  const std::size_t offset = behavioral ? kBehavioralDim : 0;
  for (int t = 0; t < kTrialsPerGame; ++t) {
    double* row = seq.values.data() + static_cast<std::size_t>(t) * seq.dim;
    if (behavioral && t < ex.prefix_size) {
      const auto b = behavioral_features(ex.prefix_decisions[t], ex.prefix_scores[t]);
      for (std::size_t j = 0; j < kBehavioralDim; ++j) row[j] = b[j];
    }
    const auto text = bank.textual(ex.shown_reviews[t]);
    std::copy(text.begin(), text.end(), row + offset);
  }
  return seq;
}

}  // namespace dmpred
