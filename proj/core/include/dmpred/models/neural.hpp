#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "dmpred/models/config.hpp"
#include "dmpred/neuro/layers.hpp"
#include "dmpred/representation.hpp"

namespace dmpred {

/// Network body (LSTM or Transformer) plus the trial and/or rate heads.
///
/// Trial head: dropout -> linear -> ReLU -> linear(2) -> softmax, hotel
/// probability in column 1. Rate head: attention pooling over the suffix
/// states -> linear -> ReLU -> dropout -> linear(1).
class NeuralNet {
 public:
  NeuralNet(const ModelConfig& config, std::size_t input_dim);

  struct Output {
    nn::Tensor trial_probs;            // R x 1, example-major suffix rows (trial head only)
    nn::Tensor rates;                  // B x 1, unclipped (rate head only)
    std::vector<std::size_t> lengths;  // suffix length per example
  };

  /// Every sequence must have input_dim() columns; Transformer models reject
  /// prefix size 0.
  Output forward(const std::vector<const TrialFeatureSeq*>& batch, const nn::ForwardContext& ctx) const;

  /// Variant-specific training loss: SCE, MSE or the weighted joint loss.
  nn::Tensor loss(const Output& out, const std::vector<const PrefixExample*>& examples) const;

  nn::ParamList params() const;
  std::size_t input_dim() const { return input_dim_; }
  const ModelConfig& config() const { return config_; }

 private:
  Output forward_lstm(const std::vector<const TrialFeatureSeq*>& batch, const nn::ForwardContext& ctx) const;
  Output forward_transformer(const std::vector<const TrialFeatureSeq*>& batch, const nn::ForwardContext& ctx) const;
  nn::Tensor trial_head(const nn::Tensor& states, const nn::ForwardContext& ctx) const;
  nn::Tensor rate_head(const nn::Tensor& pooled, const nn::ForwardContext& ctx) const;

  ModelConfig config_;
  std::size_t input_dim_ = 0;
  std::size_t width_ = 0;
  nn::Lstm lstm_;
  nn::Transformer transformer_;
  nn::Linear tr1_, tr2_;
  nn::AttentionPool pool_;
  nn::Linear cr1_, cr2_;
};

/// Transformer feed-forward width for a multiplier of the model width.
std::size_t feed_forward_width(int model_dim, double multiplier);

}  // namespace dmpred
