#pragma once

#include <cstddef>
#include <vector>

#include "dmpred/neuro/tensor.hpp"

namespace dmpred::nn {

inline constexpr double kProbClamp = 1e-7;

struct LossWeights {
  double alpha = 1.0;  // MSE
  double beta = 1.0;   // SCE
  double gamma = 1.0;  // MSTRCRE

  bool operator==(const LossWeights&) const = default;
};

/// The loss-weight grid searched for joint models.
const std::vector<LossWeights>& loss_weight_grid();

/// mean((pred - gold)^2); pred is batch x 1.
Tensor mse_loss(const Tensor& pred, const std::vector<double>& gold);

/// Suffix-averaged binary cross-entropy, then averaged over examples.
/// `probs` is R x 1 with rows grouped per example (example-major) and
/// `lengths[b]` rows for example b. Probabilities are clamped to
/// [1e-7, 1 - 1e-7] before the logs.
Tensor sce_loss(const Tensor& probs, const std::vector<int>& labels, const std::vector<std::size_t>& lengths);

/// mean_b (rate_b - mean of example b's trial probabilities)^2.
Tensor mstrcre_loss(const Tensor& rates, const Tensor& probs, const std::vector<std::size_t>& lengths);

Tensor trcrl_loss(const Tensor& mse, const Tensor& sce, const Tensor& mstrcre, const LossWeights& w);

/// Plain-value forms used for reporting.
double mse_value(const std::vector<double>& pred, const std::vector<double>& gold);
double sce_value(const std::vector<std::vector<double>>& probs, const std::vector<std::vector<int>>& labels);
double mstrcre_value(const std::vector<double>& rates, const std::vector<std::vector<double>>& probs);
/// Diagnostic variant of MSTRCRE that averages thresholded decisions
/// (probability >= 0.5) instead of probabilities. Not differentiable.
double mstrcre_argmax_value(const std::vector<double>& rates, const std::vector<std::vector<double>>& probs);
double trcrl_value(double mse, double sce, double mstrcre, const LossWeights& w);

}  // namespace dmpred::nn
