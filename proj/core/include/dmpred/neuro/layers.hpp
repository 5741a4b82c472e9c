#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dmpred/neuro/ops.hpp"
#include "dmpred/neuro/tensor.hpp"

namespace dmpred::nn {

struct NamedParam {
  std::string name;
  Tensor tensor;
};
using ParamList = std::vector<NamedParam>;

/// Uniform Xavier initialisation for a fan_in x fan_out weight.
Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

/// Mutable state threaded through a forward pass.
struct ForwardContext {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // required when training with dropout
  double dropout = 0.0;

  Tensor drop(const Tensor& x) const;
};

/// y = x W + b with W: in x out, b: 1 x out.
class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in, std::size_t out, std::mt19937_64& rng);

  Tensor operator()(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;
  std::size_t in_features() const { return weight.rows(); }
  std::size_t out_features() const { return weight.cols(); }

  Tensor weight;
  Tensor bias;
};

/// Affine layer normalisation over the last dimension.
class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(std::size_t dim);

  Tensor operator()(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

  Tensor gain;
  Tensor shift;
};

/// Stacked LSTM (gate order i, f, g, o; forget bias initialised to 1).
/// Inputs and outputs are time-major: row t * batch + b.
class Lstm {
 public:
  Lstm() = default;
  Lstm(std::size_t input, std::size_t hidden, std::size_t layers, std::mt19937_64& rng);

  /// x: (steps * batch) x input  ->  (steps * batch) x hidden (last layer).
  /// Dropout from `ctx` is applied between stacked layers only.
  Tensor forward(const Tensor& x, std::size_t batch, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;

  std::size_t hidden() const { return hidden_; }
  std::size_t layers() const { return w_input_.size(); }

 private:
  std::size_t hidden_ = 0;
  std::vector<Tensor> w_input_;
  std::vector<Tensor> w_hidden_;
  std::vector<Tensor> bias_;
};

/// Dot-product attention pooling against a learned context query.
class AttentionPool {
 public:
  AttentionPool() = default;
  AttentionPool(std::size_t dim, std::mt19937_64& rng);

  struct Result {
    Tensor pooled;   // batch x dim
    Tensor weights;  // batch x steps, rows sum to 1
  };
  /// states: (batch * steps) x dim, example-major. `mask` (batch x steps)
  /// marks positions that take part; others get weight 0. Throws when a row
  /// has no active position.
  Result operator()(const Tensor& states, std::size_t batch, const std::vector<std::vector<bool>>& mask) const;
  Result operator()(const Tensor& states) const;
  void collect(ParamList& out, const std::string& prefix) const;

  Tensor query;  // dim x 1
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(std::size_t dim, std::size_t heads, std::mt19937_64& rng);

  /// query: n x dim, memory: m x dim -> n x dim. No masking.
  Tensor operator()(const Tensor& query, const Tensor& memory, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  std::size_t heads_ = 1;
  Linear q_, k_, v_, o_;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(std::size_t dim, std::size_t hidden, std::mt19937_64& rng);
  Tensor operator()(const Tensor& x, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  Linear in_, out_;
};

/// Post-norm encoder block: LN(x + SA(x)), LN(x + FF(x)).
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(std::size_t dim, std::size_t heads, std::size_t ff, std::mt19937_64& rng);
  Tensor operator()(const Tensor& x, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  MultiHeadAttention self_;
  FeedForward ff_;
  LayerNorm n1_, n2_;
};

/// Post-norm decoder block with self- and cross-attention, no causal mask.
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(std::size_t dim, std::size_t heads, std::size_t ff, std::mt19937_64& rng);
  Tensor operator()(const Tensor& x, const Tensor& memory, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  MultiHeadAttention self_, cross_;
  FeedForward ff_;
  LayerNorm n1_, n2_, n3_;
};

/// Sinusoidal encoding of absolute positions `first .. first + count - 1`.
Matrix positional_encoding(std::size_t first, std::size_t count, std::size_t dim);

/// Encoder over the prefix trials, decoder over the suffix trials.
class Transformer {
 public:
  Transformer() = default;
  Transformer(std::size_t input, std::size_t dim, std::size_t heads, std::size_t layers, std::size_t ff,
              std::mt19937_64& rng);

  /// prefix: pr x input (pr >= 1), suffix: (10 - pr) x input, both in trial
  /// order. Returns one row per suffix trial.
  Tensor forward(const Tensor& prefix, const Tensor& suffix, const ForwardContext& ctx) const;
  void collect(ParamList& out, const std::string& prefix) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_ = 0;
  Linear embed_;
  std::vector<EncoderLayer> encoder_;
  std::vector<DecoderLayer> decoder_;
  LayerNorm enc_norm_, dec_norm_;
};

}  // namespace dmpred::nn
