#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmpred/neuro/loss.hpp"
#include "dmpred/representation.hpp"

namespace dmpred {

enum class ModelVariant { SvmCr, LstmTr, LstmCr, LstmTrcr, TransformerTr, TransformerCr, TransformerTrcr };

std::string_view to_string(ModelVariant v);
/// "svm-cr", "lstm-tr", "lstm-cr", "lstm-trcr", "transformer-tr", ...
ModelVariant parse_model_variant(std::string_view text);
const std::vector<ModelVariant>& all_variants();

bool is_neural(ModelVariant v);
bool is_transformer(ModelVariant v);
bool has_trial_head(ModelVariant v);
bool has_rate_head(ModelVariant v);
/// Smallest prefix size a variant consumes (1 for Transformer models).
int min_prefix(ModelVariant v);

enum class KernelKind { Rbf, Linear, Poly };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  int degree = 3;  // Poly only

  /// "rbf", "linear", "poly3", "poly5", "poly8" (any positive degree).
  static KernelSpec parse(std::string_view text);
  std::string str() const;
  bool operator==(const KernelSpec&) const = default;
};

struct ModelConfig {
  ModelVariant variant = ModelVariant::LstmTr;
  TextualSource textual = TextualSource::Hc;
  bool behavioral = true;

  // LSTM
  int hidden = 50;
  int lstm_layers = 1;
  // Transformer
  int transformer_layers = 3;
  double ff_multiplier = 1.0;
  int model_dim = 32;
  int heads = 4;
  // shared by neural models
  double dropout = 0.0;
  nn::LossWeights loss;
  int max_epochs = 100;
  int patience = 10;
  double learning_rate = 1e-3;
  // SVR
  KernelSpec kernel;
  double svr_c = 1.0;
  double svr_epsilon = 0.1;
  double svr_tolerance = 1e-3;

  std::uint64_t seed = 0;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
  /// Compact description of the tuned hyper-parameters, e.g.
  /// "hidden=50,layers=1,dropout=0.1".
  std::string grid_key() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

/// Candidate values searched per variant; an empty list keeps the default
/// grid for that axis.
struct GridOverrides {
  std::vector<int> hidden;
  std::vector<int> lstm_layers;
  std::vector<int> transformer_layers;
  std::vector<double> ff_multiplier;
  std::vector<double> dropout;
  std::vector<nn::LossWeights> loss;
  std::vector<KernelSpec> kernel;
};

/// Full cartesian grid for `base.variant`, with every other field copied
/// from `base`.
std::vector<ModelConfig> hyperparameter_grid(const ModelConfig& base, const GridOverrides& overrides = {});

}  // namespace dmpred
