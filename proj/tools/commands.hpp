#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dmpred::cli {

/// Flags shared by every subcommand.
struct Globals {
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  int jobs = 1;
};

/// Thrown for invalid flag combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureFlags {
  std::string lexicon;
  std::string overrides;
  std::string embeddings;
};

struct ModelFlags {
  std::string variant = "lstm-tr";
  std::string textual = "hc";
  std::string behavioral = "on";
  int hidden = 50;
  int lstm_layers = 1;
  int transformer_layers = 3;
  double ff_multiplier = 1.0;
  int model_dim = 32;
  int heads = 4;
  double dropout = 0.0;
  std::string loss = "1,1,1";
  int epochs = 100;
  int patience = 10;
  double lr = 1e-3;
  std::string kernel = "rbf";
  double svr_c = 1.0;
  double svr_epsilon = 0.1;
};

struct SimulateArgs {
  int pairs = 60;
  std::string expert = "random";
  std::string dm = "match:0.718";
  std::string split = "train_validation";
  int embedding_dim = 0;
};

struct FeaturizeArgs {
  std::string reviews;
  std::string textual = "hc";
  FeatureFlags features;
};

struct TrainArgs {
  std::string games, reviews, dev_games;
  double dev_fraction = 1.0 / 6.0;
  FeatureFlags features;
  ModelFlags model;
};

struct EvaluateArgs {
  std::string model, games, reviews;
  FeatureFlags features;
};

struct CvArgs {
  std::string train_games, train_reviews, test_games, test_reviews;
  std::vector<std::string> variants;
  std::vector<std::string> textual = {"hc"};
  std::vector<std::string> behavioral = {"on"};
  bool baselines_only = false;
  bool no_baselines = false;
  bool no_grid = false;
  int folds = 6;
  int ewg_draws = 5000;
  std::vector<int> grid_hidden, grid_lstm_layers, grid_transformer_layers;
  std::vector<double> grid_ff, grid_dropout;
  std::vector<std::string> grid_kernel, grid_loss;
  bool save_models = false;
  FeatureFlags features;
  ModelFlags model;
};

struct AblateArgs {
  std::vector<std::string> predictions;  // [name=]path
};

void run_simulate(const Globals& g, const SimulateArgs& a);
void run_featurize(const Globals& g, const FeaturizeArgs& a);
void run_train(const Globals& g, const TrainArgs& a);
void run_evaluate(const Globals& g, const EvaluateArgs& a);
void run_cv(const Globals& g, const CvArgs& a);
void run_ablate(const Globals& g, const AblateArgs& a);

/// Writes <out>/<command>_manifest.json.
void write_manifest(const Globals& g, const std::string& command, const nlohmann::json& args,
                    const std::vector<std::string>& outputs);

}  // namespace dmpred::cli
