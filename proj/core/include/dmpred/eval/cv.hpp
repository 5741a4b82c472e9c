#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmpred/eval/metrics.hpp"
#include "dmpred/models/model.hpp"

namespace dmpred::eval {

/// Seeded partition of `pair_ids` into `k` subsets whose sizes differ by at
/// most one; ids are sorted inside each subset. Throws ValidationError when
/// there are fewer than `k` pairs or duplicates.
std::vector<std::vector<std::string>> make_folds(std::span<const std::string> pair_ids, int k, std::uint64_t seed);

/// Examples whose pair id is (or is not) in `pairs`.
std::vector<PrefixExample> select_pairs(std::span<const PrefixExample> examples, std::span<const std::string> pairs,
                                        bool keep);

std::vector<Outcome> outcomes_of(std::span<const PrefixExample> examples, std::span<const Prediction> predictions);

/// "lstm-tr/hc/behavioral", "svm-cr/dnn/no-behavioral", ...
std::string run_name(const ModelConfig& config);

struct CvOptions {
  int folds = 6;
  std::uint64_t seed = 0;  // fold partition and EWG draws
  int jobs = 1;
  bool baselines = true;
  int ewg_draws = 5000;
};

struct GridCell {
  ModelConfig config;
  std::vector<double> dev_rmse;  // per fold
  double mean_dev_rmse = 0.0;
};

struct FoldRun {
  int fold = 0;
  std::size_t train_examples = 0;
  std::size_t dev_examples = 0;
  double dev_rmse = 0.0;  // NaN for baselines
  MetricReport test;
  AblationReport ablation;
  std::shared_ptr<const TrainedModel> model;  // null for baselines
};

struct RunResult {
  std::string name;
  bool baseline = false;
  std::vector<GridCell> grid;  // empty for baselines
  std::size_t selected = 0;    // index into grid
  std::vector<FoldRun> folds;
  MetricReport mean;
  AblationReport mean_ablation;
};

struct CvResult {
  std::vector<std::vector<std::string>> folds;
  std::vector<RunResult> runs;
};

/// Six-fold protocol: for every grid cell and fold, train on the other folds
/// and early-stop / score on the held-out fold. The cell with the lowest mean
/// dev RMSE is selected and its per-fold models are scored on `test`; the
/// run reports the mean across folds. Each entry of `grids` is one run (one
/// model / feature configuration). Baselines (AVG, MED, MVC, EWG) are fitted
/// on each fold's training pairs when `options.baselines` is set.
CvResult six_fold_cv(const Dataset& train_validation, const Dataset& test,
                     const std::vector<std::vector<ModelConfig>>& grids, const FeatureSources& sources,
                     const CvOptions& options);

/// Deterministic JSON (sorted keys, full precision).
nlohmann::json metrics_json(const CvResult& result);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

/// Rows: run, slice ("prefix" | "trial"), key, metric, value.
void write_ablation_csv(std::span<const RunResult> runs, const std::filesystem::path& path);

/// Line chart of one metric against the slice key, one series per run.
/// `slice` is "prefix" or "trial"; `metric` one of accuracy, macro_f1, rmse,
/// bin_macro_f1, gold_hotel_fraction.
std::string ablation_svg(std::span<const RunResult> runs, const std::string& slice, const std::string& metric);

/// Writes the CSV and every chart into `dir`.
void write_ablation_outputs(std::span<const RunResult> runs, const std::filesystem::path& dir);

}  // namespace dmpred::eval
