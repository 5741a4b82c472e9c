#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmpred/models/config.hpp"
#include "dmpred/models/neural.hpp"
#include "dmpred/models/svr.hpp"
#include "dmpred/representation.hpp"

namespace dmpred {

/// Where textual vectors come from. Either pointer may be null when the
/// configured source does not need it.
struct FeatureSources {
  const HCTable* hc = nullptr;
  const EmbeddingTable* embeddings = nullptr;
};

struct EpochRecord {
  int epoch = 0;            // 0 = initialised model
  double train_loss = 0.0;  // mean batch loss (0 for epoch 0)
  double dev_rmse = 0.0;    // x100
  double dev_loss = 0.0;    // training objective on dev, tie-breaker for dev_rmse
};

struct TrainOptions {
  std::function<void(const EpochRecord&)> on_epoch;
};

class TrainedModel {
 public:
  const ModelConfig& config() const { return config_; }
  /// Standardisation statistics of the embedding block (empty for HC).
  const Standardizer& standardizer() const { return standardizer_; }
  const std::vector<EpochRecord>& log() const { return log_; }
  int best_epoch() const { return best_epoch_; }
  /// Dev RMSE of the returned checkpoint, or NaN when none was measured.
  double best_dev_rmse() const;
  std::size_t input_dim() const { return input_dim_; }

  const NeuralNet* net() const { return net_.get(); }
  const SvrModel* svr() const { return svr_ ? &*svr_ : nullptr; }

  /// Textual vectors for `review_ids`, standardised with this model's stats.
  FeatureBank feature_bank(std::span<const std::string> review_ids, const FeatureSources& sources) const;

  /// Binary parameter file (see nn::write_param_file) holding the config,
  /// standardisation stats and learned parameters.
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

  /// Config, seed, grid cell, best epoch, dev RMSE and training log.
  nlohmann::json manifest() const;

 private:
  friend TrainedModel train_svr(std::span<const PrefixExample>, const FeatureSources&, const ModelConfig&);
  friend TrainedModel train_neural(std::span<const PrefixExample>, std::span<const PrefixExample>,
                                   const FeatureSources&, const ModelConfig&, const TrainOptions&);

  ModelConfig config_;
  Standardizer standardizer_;
  std::size_t input_dim_ = 0;
  std::vector<EpochRecord> log_;
  int best_epoch_ = 0;
  std::shared_ptr<NeuralNet> net_;
  std::optional<SvrModel> svr_;
};

/// Unique review ids shown in `examples`, sorted.
std::vector<std::string> review_ids_of(std::span<const PrefixExample> examples);

/// SVM-CR: epsilon-SVR on the SVM representation against y_CR.
TrainedModel train_svr(std::span<const PrefixExample> train, const FeatureSources& sources,
                       const ModelConfig& config);

/// Adam with early stopping on dev RMSE; batches hold all examples of one
/// decision-maker. Returns the best-dev checkpoint. Throws ValidationError on
/// empty sets, a non-neural variant, or prefix sizes the variant excludes.
TrainedModel train_neural(std::span<const PrefixExample> train, std::span<const PrefixExample> dev,
                          const FeatureSources& sources, const ModelConfig& config,
                          const TrainOptions& options = {});

/// Dispatches on the variant (`dev` is unused for SVM-CR).
TrainedModel train_model(std::span<const PrefixExample> train, std::span<const PrefixExample> dev,
                         const FeatureSources& sources, const ModelConfig& config,
                         const TrainOptions& options = {});

struct Prediction {
  std::vector<double> probabilities;  // per suffix trial; empty for CR-only models
  std::vector<int> decisions;         // probability >= 0.5
  double choice_rate = 0.0;           // in [0, 1]
  std::optional<double> raw_rate;     // unclipped rate-head / SVR output
};

double clip_rate(double raw);

/// Batched prediction; output order follows `examples`.
std::vector<Prediction> predict(const TrainedModel& model, std::span<const PrefixExample> examples,
                                const FeatureSources& sources);
std::vector<Prediction> predict(const TrainedModel& model, std::span<const PrefixExample> examples,
                                const FeatureBank& bank);

struct TrialPredictions {
  std::vector<double> probabilities;
  std::vector<int> decisions;
};

/// Throws ValidationError for CR-only variants.
TrialPredictions predict_trials(const TrainedModel& model, const PrefixExample& example,
                                const FeatureSources& sources);
/// Clipped choice rate; TR models average their binary decisions.
double predict_choice_rate(const TrainedModel& model, const PrefixExample& example, const FeatureSources& sources);

}  // namespace dmpred
