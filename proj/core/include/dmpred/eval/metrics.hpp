#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmpred/game.hpp"

namespace dmpred::eval {

/// Choice-rate bins 1..4: [0, .25), [.25, .5), [.5, .75), [.75, 1].
int bin_of(double rate);

struct F1Report {
  double macro = 0.0;             // x100, mean of per_class
  std::vector<double> per_class;  // x100; index = class label (or bin - 1)
};

/// Pooled fraction of matching labels, x100. Throws ValidationError on
/// misaligned or empty input.
double per_trial_accuracy(std::span<const int> pred, std::span<const int> gold);
/// Macro F1 over classes 0 .. n_classes-1. A class with no true positives
/// (including one absent from both vectors) scores 0.
F1Report macro_f1(std::span<const int> pred, std::span<const int> gold, int n_classes = 2);
/// sqrt(mean squared error) x 100.
double rmse(std::span<const double> pred, std::span<const double> gold);
F1Report bin_macro_f1(std::span<const double> pred, std::span<const double> gold);

/// One scored example: gold suffix labels and rate with the prediction.
/// `pred_labels` is empty for models that only predict a rate.
struct Outcome {
  std::string pair_id;
  int prefix_size = 0;
  std::vector<int> gold_labels;
  std::vector<int> pred_labels;
  double gold_rate = 0.0;
  double pred_rate = 0.0;
};

struct MetricReport {
  std::size_t examples = 0;
  std::size_t trials = 0;
  std::optional<double> accuracy;  // trial metrics only when every outcome has labels
  std::optional<F1Report> trial_f1;
  double rmse = 0.0;
  F1Report bin_f1;
};

MetricReport compute_report(std::span<const Outcome> outcomes);

struct PrefixSlice {
  int prefix_size = 0;
  MetricReport report;
};

/// Trial-level metrics of every suffix trial with a given 1-based index.
struct TrialSlice {
  int trial = 0;
  std::size_t count = 0;
  double gold_hotel_fraction = 0.0;  // x100
  std::optional<double> accuracy;
  std::optional<F1Report> trial_f1;
};

struct AblationReport {
  std::vector<PrefixSlice> by_prefix;  // only prefix sizes present
  std::vector<TrialSlice> by_trial;    // only trial indices present
};

AblationReport ablation_report(std::span<const Outcome> outcomes);

/// Field-wise mean; optional fields are averaged only when present in all.
MetricReport mean_report(std::span<const MetricReport> reports);
AblationReport mean_ablation(std::span<const AblationReport> reports);

nlohmann::json to_json(const F1Report& r);
nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const AblationReport& r);

// ---------------------------------------------------------------- baselines

/// Mean of training choice rates. Throws ValidationError when empty.
double avg_baseline(std::span<const double> train_rates);
/// Sorted median (mean of the two middle values for an even count).
double med_baseline(std::span<const double> train_rates);
/// 1 (Hotel) when the pooled suffix-label mean is >= 0.5.
int mvc_baseline(std::span<const PrefixExample> train);
/// Pooled hotel frequency over all suffix labels.
double hotel_frequency(std::span<const PrefixExample> examples);

/// Outcomes of a constant rate prediction (no trial labels).
std::vector<Outcome> constant_rate_outcomes(std::span<const PrefixExample> test, double rate);
/// Outcomes of a constant label on every trial; the rate is that label.
std::vector<Outcome> constant_label_outcomes(std::span<const PrefixExample> test, int label);

/// Expected accuracy of labelling Hotel with probability p when a fraction q
/// of the gold labels is Hotel, x100.
double ewg_expected_accuracy(double p, double q);

/// Every test trial is labelled Hotel with probability p (the training
/// frequency); metrics are averaged over `draws` seeded assignments. The
/// per-example rate is the mean of its drawn labels.
MetricReport ewg_baseline(std::span<const PrefixExample> train, std::span<const PrefixExample> test,
                          int draws = 5000, std::uint64_t seed = 0);
MetricReport ewg_report(double p, std::span<const PrefixExample> test, int draws, std::uint64_t seed);

}  // namespace dmpred::eval
