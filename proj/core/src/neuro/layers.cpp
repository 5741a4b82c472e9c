#include "dmpred/neuro/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpred::nn {

Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(fan_in, fan_out);
  for (double& v : m.data) v = u(rng);
  return m;
}

Tensor ForwardContext::drop(const Tensor& x) const {
  if (!training || dropout <= 0.0) return x;
  if (rng == nullptr) throw std::logic_error("dropout in training mode needs an RNG");
  return nn::dropout(x, dropout, training, *rng);
}

// --- Linear -----------------------------------------------------------------

Linear::Linear(std::size_t in, std::size_t out, std::mt19937_64& rng)
    : weight(parameter(xavier_uniform(in, out, rng))), bias(parameter(Matrix(1, out))) {}

Tensor Linear::operator()(const Tensor& x) const { return add(matmul(x, weight), bias); }

void Linear::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

// --- LayerNorm --------------------------------------------------------------

LayerNorm::LayerNorm(std::size_t dim) : gain(parameter(Matrix(1, dim, 1.0))), shift(parameter(Matrix(1, dim))) {}

Tensor LayerNorm::operator()(const Tensor& x) const { return add(mul(normalize_rows(x), gain), shift); }

void LayerNorm::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + ".gain", gain});
  out.push_back({prefix + ".shift", shift});
}

// --- LSTM -------------------------------------------------------------------

Lstm::Lstm(std::size_t input, std::size_t hidden, std::size_t layers, std::mt19937_64& rng) : hidden_(hidden) {
  if (layers == 0 || hidden == 0) throw std::invalid_argument("LSTM needs at least one layer and hidden unit");
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input : hidden;
    // Each gate block is initialised like its own in x hidden matrix.
    Matrix wx(in, 4 * hidden), wh(hidden, 4 * hidden);
    for (std::size_t g = 0; g < 4; ++g) {
      const Matrix bx = xavier_uniform(in, hidden, rng);
      const Matrix bh = xavier_uniform(hidden, hidden, rng);
      for (std::size_t r = 0; r < in; ++r)
        for (std::size_t c = 0; c < hidden; ++c) wx(r, g * hidden + c) = bx(r, c);
      for (std::size_t r = 0; r < hidden; ++r)
        for (std::size_t c = 0; c < hidden; ++c) wh(r, g * hidden + c) = bh(r, c);
    }
    Matrix b(1, 4 * hidden);
    for (std::size_t c = hidden; c < 2 * hidden; ++c) b.data[c] = 1.0;
    w_input_.push_back(parameter(std::move(wx)));
    w_hidden_.push_back(parameter(std::move(wh)));
    bias_.push_back(parameter(std::move(b)));
  }
}

Tensor Lstm::forward(const Tensor& x, std::size_t batch, const ForwardContext& ctx) const {
  if (batch == 0 || x.rows() % batch != 0) throw ShapeError("LSTM input rows not a multiple of the batch");
  if (x.cols() != w_input_.front().rows()) {
    throw ShapeError("LSTM expects " + std::to_string(w_input_.front().rows()) + " input features, got " +
                     std::to_string(x.cols()));
  }
  const std::size_t steps = x.rows() / batch;
  const std::size_t h = hidden_;
  Tensor layer_in = x;
  for (std::size_t l = 0; l < layers(); ++l) {
    if (l > 0) layer_in = ctx.drop(layer_in);
    const Tensor xw = add(matmul(layer_in, w_input_[l]), bias_[l]);
    Tensor hs, cs;
    std::vector<Tensor> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      Tensor gates = slice_rows(xw, t * batch, batch);
      if (t > 0) gates = add(gates, matmul(hs, w_hidden_[l]));
      const Tensor i = sigmoid(slice_cols(gates, 0, h));
      const Tensor f = sigmoid(slice_cols(gates, h, h));
      const Tensor g = tanh(slice_cols(gates, 2 * h, h));
      const Tensor o = sigmoid(slice_cols(gates, 3 * h, h));
      cs = t == 0 ? mul(i, g) : add(mul(f, cs), mul(i, g));
      hs = mul(o, tanh(cs));
      outputs.push_back(hs);
    }
    layer_in = concat_rows(outputs);
  }
  return layer_in;
}

void Lstm::collect(ParamList& out, const std::string& prefix) const {
  for (std::size_t l = 0; l < layers(); ++l) {
    const std::string p = prefix + ".l" + std::to_string(l);
    out.push_back({p + ".w_input", w_input_[l]});
    out.push_back({p + ".w_hidden", w_hidden_[l]});
    out.push_back({p + ".bias", bias_[l]});
  }
}

// --- Attention pooling ------------------------------------------------------

AttentionPool::AttentionPool(std::size_t dim, std::mt19937_64& rng) : query(parameter(xavier_uniform(dim, 1, rng))) {}

AttentionPool::Result AttentionPool::operator()(const Tensor& states, std::size_t batch,
                                                const std::vector<std::vector<bool>>& mask) const {
  if (batch == 0 || states.rows() == 0) throw ShapeError("attention over an empty collection");
  if (states.rows() % batch != 0 || mask.size() != batch) throw ShapeError("attention mask does not match states");
  const std::size_t steps = states.rows() / batch;
  Matrix bias(batch, steps);
  for (std::size_t b = 0; b < batch; ++b) {
    if (mask[b].size() != steps) throw ShapeError("attention mask row has the wrong length");
    bool any = false;
    for (std::size_t t = 0; t < steps; ++t) {
      any = any || mask[b][t];
      bias(b, t) = mask[b][t] ? 0.0 : -1e30;
    }
    if (!any) throw ShapeError("attention row with no active position");
  }
  const Tensor scores = add(reshape(matmul(states, query), batch, steps), constant(std::move(bias)));
  const Tensor w = softmax_rows(scores);
  return {segment_weighted_sum(w, states), w};
}

AttentionPool::Result AttentionPool::operator()(const Tensor& states) const {
  return (*this)(states, 1, {std::vector<bool>(states.rows(), true)});
}

void AttentionPool::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + ".query", query});
}

// --- Multi-head attention -----------------------------------------------------

MultiHeadAttention::MultiHeadAttention(std::size_t dim, std::size_t heads, std::mt19937_64& rng)
    : heads_(heads), q_(dim, dim, rng), k_(dim, dim, rng), v_(dim, dim, rng), o_(dim, dim, rng) {
  if (heads == 0 || dim % heads != 0) {
    throw std::invalid_argument("model width " + std::to_string(dim) + " not divisible by " +
                                std::to_string(heads) + " heads");
  }
}

Tensor MultiHeadAttention::operator()(const Tensor& query, const Tensor& memory, const ForwardContext& ctx) const {
  const Tensor q = q_(query);
  const Tensor k = k_(memory);
  const Tensor v = v_(memory);
  const std::size_t dk = q.cols() / heads_;
  const double s = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<Tensor> outs;
  outs.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Tensor qh = slice_cols(q, h * dk, dk);
    const Tensor kh = slice_cols(k, h * dk, dk);
    const Tensor vh = slice_cols(v, h * dk, dk);
    const Tensor att = ctx.drop(softmax_rows(scale(matmul(qh, transpose(kh)), s)));
    outs.push_back(matmul(att, vh));
  }
  return o_(heads_ == 1 ? outs.front() : concat_cols(outs));
}

void MultiHeadAttention::collect(ParamList& out, const std::string& prefix) const {
  q_.collect(out, prefix + ".q");
  k_.collect(out, prefix + ".k");
  v_.collect(out, prefix + ".v");
  o_.collect(out, prefix + ".o");
}

// --- Feed-forward -------------------------------------------------------------

FeedForward::FeedForward(std::size_t dim, std::size_t hidden, std::mt19937_64& rng)
    : in_(dim, hidden, rng), out_(hidden, dim, rng) {}

Tensor FeedForward::operator()(const Tensor& x, const ForwardContext& ctx) const {
  return out_(ctx.drop(relu(in_(x))));
}

void FeedForward::collect(ParamList& out, const std::string& prefix) const {
  in_.collect(out, prefix + ".in");
  out_.collect(out, prefix + ".out");
}

// --- Encoder / decoder blocks -------------------------------------------------

EncoderLayer::EncoderLayer(std::size_t dim, std::size_t heads, std::size_t ff, std::mt19937_64& rng)
    : self_(dim, heads, rng), ff_(dim, ff, rng), n1_(dim), n2_(dim) {}

Tensor EncoderLayer::operator()(const Tensor& x, const ForwardContext& ctx) const {
  const Tensor a = n1_(add(x, ctx.drop(self_(x, x, ctx))));
  return n2_(add(a, ctx.drop(ff_(a, ctx))));
}

void EncoderLayer::collect(ParamList& out, const std::string& prefix) const {
  self_.collect(out, prefix + ".self");
  ff_.collect(out, prefix + ".ff");
  n1_.collect(out, prefix + ".norm1");
  n2_.collect(out, prefix + ".norm2");
}

DecoderLayer::DecoderLayer(std::size_t dim, std::size_t heads, std::size_t ff, std::mt19937_64& rng)
    : self_(dim, heads, rng), cross_(dim, heads, rng), ff_(dim, ff, rng), n1_(dim), n2_(dim), n3_(dim) {}

Tensor DecoderLayer::operator()(const Tensor& x, const Tensor& memory, const ForwardContext& ctx) const {
  const Tensor a = n1_(add(x, ctx.drop(self_(x, x, ctx))));
  const Tensor b = n2_(add(a, ctx.drop(cross_(a, memory, ctx))));
  return n3_(add(b, ctx.drop(ff_(b, ctx))));
}

void DecoderLayer::collect(ParamList& out, const std::string& prefix) const {
  self_.collect(out, prefix + ".self");
  cross_.collect(out, prefix + ".cross");
  ff_.collect(out, prefix + ".ff");
  n1_.collect(out, prefix + ".norm1");
  n2_.collect(out, prefix + ".norm2");
  n3_.collect(out, prefix + ".norm3");
}

Matrix positional_encoding(std::size_t first, std::size_t count, std::size_t dim) {
  Matrix pe(count, dim);
  for (std::size_t r = 0; r < count; ++r) {
    const double pos = static_cast<double>(first + r);
    for (std::size_t c = 0; c < dim; ++c) {
      const double freq = std::pow(10000.0, -static_cast<double>(c - c % 2) / static_cast<double>(dim));
      pe(r, c) = c % 2 == 0 ? std::sin(pos * freq) : std::cos(pos * freq);
    }
  }
  return pe;
}

// --- Transformer ----------------------------------------------------------------

Transformer::Transformer(std::size_t input, std::size_t dim, std::size_t heads, std::size_t layers, std::size_t ff,
                         std::mt19937_64& rng)
    : dim_(dim), embed_(input, dim, rng), enc_norm_(dim), dec_norm_(dim) {
  if (layers == 0) throw std::invalid_argument("transformer needs at least one layer");
  for (std::size_t l = 0; l < layers; ++l) encoder_.emplace_back(dim, heads, ff, rng);
  for (std::size_t l = 0; l < layers; ++l) decoder_.emplace_back(dim, heads, ff, rng);
}

Tensor Transformer::forward(const Tensor& prefix, const Tensor& suffix, const ForwardContext& ctx) const {
  if (prefix.rows() == 0) throw ShapeError("transformer needs a non-empty prefix (prefix size 0 is not supported)");
  if (suffix.rows() == 0) throw ShapeError("transformer needs a non-empty suffix");
  const std::size_t pr = prefix.rows();
  Tensor mem = ctx.drop(add(embed_(prefix), constant(positional_encoding(1, pr, dim_))));
  for (const auto& layer : encoder_) mem = layer(mem, ctx);
  mem = enc_norm_(mem);
  Tensor out = ctx.drop(add(embed_(suffix), constant(positional_encoding(pr + 1, suffix.rows(), dim_))));
  for (const auto& layer : decoder_) out = layer(out, mem, ctx);
  return dec_norm_(out);
}

void Transformer::collect(ParamList& out, const std::string& prefix) const {
  embed_.collect(out, prefix + ".embed");
  for (std::size_t l = 0; l < encoder_.size(); ++l) encoder_[l].collect(out, prefix + ".enc" + std::to_string(l));
  for (std::size_t l = 0; l < decoder_.size(); ++l) decoder_[l].collect(out, prefix + ".dec" + std::to_string(l));
  enc_norm_.collect(out, prefix + ".enc_norm");
  dec_norm_.collect(out, prefix + ".dec_norm");
}

}  // namespace dmpred::nn
