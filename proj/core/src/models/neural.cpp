#include "dmpred/models/neural.hpp"

#include <cmath>

namespace dmpred {

using nn::Tensor;

std::size_t feed_forward_width(int model_dim, double multiplier) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(model_dim * multiplier)));
}

NeuralNet::NeuralNet(const ModelConfig& config, std::size_t input_dim) : config_(config), input_dim_(input_dim) {
  config.validate();
  if (!is_neural(config.variant)) throw ValidationError("SVM-CR is not a neural model");
  if (input_dim == 0) throw ValidationError("neural model needs a positive input width");
  std::mt19937_64 rng(config.seed);
  if (is_transformer(config.variant)) {
    width_ = static_cast<std::size_t>(config.model_dim);
    transformer_ = nn::Transformer(input_dim, width_, static_cast<std::size_t>(config.heads),
                                   static_cast<std::size_t>(config.transformer_layers),
                                   feed_forward_width(config.model_dim, config.ff_multiplier), rng);
  } else {
    width_ = static_cast<std::size_t>(config.hidden);
    lstm_ = nn::Lstm(input_dim, width_, static_cast<std::size_t>(config.lstm_layers), rng);
  }
  if (has_trial_head(config.variant)) {
    tr1_ = nn::Linear(width_, width_, rng);
    tr2_ = nn::Linear(width_, 2, rng);
  }
  if (has_rate_head(config.variant)) {
    pool_ = nn::AttentionPool(width_, rng);
    cr1_ = nn::Linear(width_, width_, rng);
    cr2_ = nn::Linear(width_, 1, rng);
  }
}

Tensor NeuralNet::trial_head(const Tensor& states, const nn::ForwardContext& ctx) const {
  const Tensor logits = tr2_(nn::relu(tr1_(ctx.drop(states))));
  return nn::slice_cols(nn::softmax_rows(logits), 1, 1);
}

Tensor NeuralNet::rate_head(const Tensor& pooled, const nn::ForwardContext& ctx) const {
  return cr2_(ctx.drop(nn::relu(cr1_(pooled))));
}

NeuralNet::Output NeuralNet::forward(const std::vector<const TrialFeatureSeq*>& batch,
                                     const nn::ForwardContext& ctx) const {
  if (batch.empty()) throw ValidationError("forward pass over an empty batch");
  for (const auto* s : batch) {
    if (s->dim != input_dim_) {
      throw ValidationError("sequence width " + std::to_string(s->dim) + " does not match model input " +
                            std::to_string(input_dim_));
    }
    if (s->prefix_size < 0 || s->prefix_size >= kTrialsPerGame) throw ValidationError("prefix size outside 0..9");
  }
  return is_transformer(config_.variant) ? forward_transformer(batch, ctx) : forward_lstm(batch, ctx);
}

NeuralNet::Output NeuralNet::forward_lstm(const std::vector<const TrialFeatureSeq*>& batch,
                                          const nn::ForwardContext& ctx) const {
  const std::size_t B = batch.size();
  const std::size_t T = kTrialsPerGame;
  nn::Matrix x(T * B, input_dim_);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t) {
      const auto row = batch[b]->row(static_cast<int>(t));
      std::copy(row.begin(), row.end(), &x.data[(t * B + b) * input_dim_]);
    }
  const Tensor h = lstm_.forward(nn::constant(std::move(x)), B, ctx);

  Output out;
  std::vector<std::size_t> suffix_rows;
  for (std::size_t b = 0; b < B; ++b) {
    const auto pr = static_cast<std::size_t>(batch[b]->prefix_size);
    out.lengths.push_back(T - pr);
    for (std::size_t t = pr; t < T; ++t) suffix_rows.push_back(t * B + b);
  }
  if (has_trial_head(config_.variant)) out.trial_probs = trial_head(nn::select_rows(h, suffix_rows), ctx);
  if (has_rate_head(config_.variant)) {
    std::vector<std::size_t> example_major;
    std::vector<std::vector<bool>> mask(B, std::vector<bool>(T));
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t t = 0; t < T; ++t) {
        example_major.push_back(t * B + b);
        mask[b][t] = t >= static_cast<std::size_t>(batch[b]->prefix_size);
      }
    const auto pooled = pool_(nn::select_rows(h, example_major), B, mask).pooled;
    out.rates = rate_head(pooled, ctx);
  }
  return out;
}

NeuralNet::Output NeuralNet::forward_transformer(const std::vector<const TrialFeatureSeq*>& batch,
                                                 const nn::ForwardContext& ctx) const {
  Output out;
  std::vector<Tensor> states, pooled;
  for (const auto* seq : batch) {
    const auto pr = static_cast<std::size_t>(seq->prefix_size);
    if (pr == 0) throw ValidationError("transformer models do not accept prefix size 0");
    const std::size_t sf = kTrialsPerGame - pr;
    nn::Matrix p(pr, input_dim_,
                 std::vector<double>(seq->values.begin(), seq->values.begin() + static_cast<long>(pr * input_dim_)));
    nn::Matrix s(sf, input_dim_,
                 std::vector<double>(seq->values.begin() + static_cast<long>(pr * input_dim_), seq->values.end()));
    const Tensor o = transformer_.forward(nn::constant(std::move(p)), nn::constant(std::move(s)), ctx);
    out.lengths.push_back(sf);
    states.push_back(o);
    if (has_rate_head(config_.variant)) pooled.push_back(pool_(o).pooled);
  }
  if (has_trial_head(config_.variant)) out.trial_probs = trial_head(nn::concat_rows(states), ctx);
  if (has_rate_head(config_.variant)) out.rates = rate_head(nn::concat_rows(pooled), ctx);
  return out;
}

Tensor NeuralNet::loss(const Output& out, const std::vector<const PrefixExample*>& examples) const {
  std::vector<int> labels;
  std::vector<double> rates;
  for (const auto* ex : examples) {
    labels.insert(labels.end(), ex->suffix_labels.begin(), ex->suffix_labels.end());
    rates.push_back(ex->choice_rate);
  }
  switch (config_.variant) {
    case ModelVariant::LstmTr:
    case ModelVariant::TransformerTr: return nn::sce_loss(out.trial_probs, labels, out.lengths);
    case ModelVariant::LstmCr:
    case ModelVariant::TransformerCr: return nn::mse_loss(out.rates, rates);
    case ModelVariant::LstmTrcr:
    case ModelVariant::TransformerTrcr:
      return nn::trcrl_loss(nn::mse_loss(out.rates, rates), nn::sce_loss(out.trial_probs, labels, out.lengths),
                            nn::mstrcre_loss(out.rates, out.trial_probs, out.lengths), config_.loss);
    case ModelVariant::SvmCr: break;
  }
  throw ValidationError("no neural loss for SVM-CR");
}

nn::ParamList NeuralNet::params() const {
  nn::ParamList p;
  if (is_transformer(config_.variant)) transformer_.collect(p, "transformer");
  else lstm_.collect(p, "lstm");
  if (has_trial_head(config_.variant)) {
    tr1_.collect(p, "trial.fc1");
    tr2_.collect(p, "trial.fc2");
  }
  if (has_rate_head(config_.variant)) {
    pool_.collect(p, "rate.attention");
    cr1_.collect(p, "rate.fc1");
    cr2_.collect(p, "rate.fc2");
  }
  return p;
}

}  // namespace dmpred
